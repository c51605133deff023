#include "coopinit/version.hpp"

#include <string>

namespace coopinit {

const char* build_id() {
  static const std::string id = std::string("coopinit ") + kVersion +
#if defined(__VERSION__)
                                " (compiler " __VERSION__ ")";
#else
                                "";
#endif
  return id.c_str();
}

}  // namespace coopinit
