#ifndef LGWM_IO_H_
#define LGWM_IO_H_

#include <string>
#include <string_view>

namespace lgwm {

// Whole-file helpers; both throw Error(kIo) on failure.
std::string ReadFile(const std::string &path);
void WriteFile(const std::string &path, std::string_view contents);

}  // namespace lgwm

#endif  // LGWM_IO_H_
