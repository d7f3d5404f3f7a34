#include "singdet/common.hpp"

#include <iostream>
#include <mutex>

namespace singdet {

void warn(const std::string& message) {
  static std::mutex mu;
  std::lock_guard lock(mu);
  std::cerr << "warning: " << message << '\n';
}

}  // namespace singdet
