#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace safe_rl::nn {

struct ParamSlice {
  std::string name;
  Eigen::Index offset = 0;
  Eigen::Index rows = 0;
  Eigen::Index cols = 1;

  Eigen::Index size() const { return rows * cols; }
  bool operator==(const ParamSlice&) const = default;
};

// Flat parameter array plus a layout naming each contiguous (column-major) block.
struct ParamVector {
  Eigen::VectorXd values;
  std::vector<ParamSlice> layout;

  Eigen::Index size() const { return values.size(); }

  // Layout must tile [0, size) exactly, in order, without gaps or overlap.
  void validate() const;

  Eigen::Map<Eigen::MatrixXd> block(std::size_t i) {
    const ParamSlice& s = layout.at(i);
    return {values.data() + s.offset, s.rows, s.cols};
  }
  Eigen::Map<const Eigen::MatrixXd> block(std::size_t i) const {
    const ParamSlice& s = layout.at(i);
    return {values.data() + s.offset, s.rows, s.cols};
  }
};

// Appends `b`'s slices (renamed with `prefix`) after `a`'s.
ParamVector concat(const ParamVector& a, const ParamVector& b, const std::string& prefix);

inline constexpr int kCheckpointVersion = 1;

// JSON checkpoint: {"format", "version", "layout", "values", "metadata"}.
// Doubles are written in shortest round-trip form, so load(save(p)) == p bitwise.
std::string checkpoint_to_json(const ParamVector& params, const std::string& metadata_json = "{}");
ParamVector checkpoint_from_json(const std::string& text, std::string* metadata_json = nullptr);
void save_checkpoint(const ParamVector& params, const std::string& path,
                     const std::string& metadata_json = "{}");
ParamVector load_checkpoint(const std::string& path, std::string* metadata_json = nullptr);

}  // namespace safe_rl::nn
