#pragma once

#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace anoncomp::detail {

template <class T>
void print(std::ostream& os, const T& value) {
  os << value;
}

template <class T>
void print(std::ostream& os, const std::optional<T>& value) {
  if (!value) {
    os << '-';
  } else {
    print(os, *value);
  }
}

template <class T>
void print(std::ostream& os, const std::vector<T>& values) {
  os << '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os << "; ";
    print(os, values[i]);
  }
  os << ']';
}

template <class T>
std::string text(const T& value) {
  std::ostringstream os;
  print(os, value);
  return os.str();
}

}  // namespace anoncomp::detail
