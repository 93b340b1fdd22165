#include "safe_rl/nn/param_vector.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "safe_rl/common/error.hpp"

namespace safe_rl::nn {

using nlohmann::json;

void ParamVector::validate() const {
  Eigen::Index next = 0;
  for (const ParamSlice& s : layout) {
    require(s.offset == next, ErrorCode::kInvalidArgument,
            "layout slice '" + s.name + "' does not start where the previous one ended");
    require(s.rows >= 0 && s.cols >= 0, ErrorCode::kInvalidArgument, "negative slice shape");
    next += s.size();
  }
  require_same_size(next, values.size(), "layout coverage");
}

ParamVector concat(const ParamVector& a, const ParamVector& b, const std::string& prefix) {
  ParamVector out;
  out.values.resize(a.size() + b.size());
  out.values << a.values, b.values;
  out.layout = a.layout;
  for (ParamSlice s : b.layout) {
    s.name = prefix + s.name;
    s.offset += a.size();
    out.layout.push_back(std::move(s));
  }
  return out;
}

std::string checkpoint_to_json(const ParamVector& params, const std::string& metadata_json) {
  params.validate();
  json j;
  j["format"] = "safe_rl.params";
  j["version"] = kCheckpointVersion;
  json layout = json::array();
  for (const ParamSlice& s : params.layout) {
    layout.push_back({{"name", s.name}, {"offset", s.offset}, {"rows", s.rows}, {"cols", s.cols}});
  }
  j["layout"] = std::move(layout);
  j["values"] = std::vector<double>(params.values.data(), params.values.data() + params.size());
  try {
    j["metadata"] = json::parse(metadata_json);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("checkpoint metadata: ") + e.what());
  }
  return j.dump();
}

ParamVector checkpoint_from_json(const std::string& text, std::string* metadata_json) {
  ParamVector p;
  try {
    const json j = json::parse(text);
    require(j.at("format") == "safe_rl.params", ErrorCode::kInvalidArgument,
            "not a parameter checkpoint");
    const int version = j.at("version").get<int>();
    require(version == kCheckpointVersion, ErrorCode::kInvalidArgument,
            "unsupported checkpoint version " + std::to_string(version));
    for (const json& s : j.at("layout")) {
      p.layout.push_back({s.at("name").get<std::string>(), s.at("offset").get<Eigen::Index>(),
                          s.at("rows").get<Eigen::Index>(), s.at("cols").get<Eigen::Index>()});
    }
    const auto values = j.at("values").get<std::vector<double>>();
    p.values = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    if (metadata_json) *metadata_json = j.value("metadata", json::object()).dump();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad checkpoint: ") + e.what());
  }
  p.validate();
  return p;
}

void save_checkpoint(const ParamVector& params, const std::string& path,
                     const std::string& metadata_json) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + path);
  out << checkpoint_to_json(params, metadata_json) << '\n';
}

ParamVector load_checkpoint(const std::string& path, std::string* metadata_json) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str(), metadata_json);
}

}  // namespace safe_rl::nn
