#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "safe_rl/common/error.hpp"

namespace safe_rl {

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot write '" + path + "'");
  out << text;
  require(static_cast<bool>(out), ErrorCode::kIo, "write failed for '" + path + "'");
}

}  // namespace safe_rl
