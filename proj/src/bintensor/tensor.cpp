/* Copyright 2026 The binloc Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "binloc/tensor.hpp"

#include <cmath>
#include <sstream>

namespace binloc {

std::string to_string(const Shape4& s) {
  std::ostringstream os;
  os << s;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Shape4& s) {
  return os << "(" << s.n << ", " << s.c << ", " << s.h << ", " << s.w << ")";
}

template <typename T>
void require_finite(const Tensor<T>& t, const char* what) {
  for (const T v : t.data()) {
    if (!std::isfinite(v)) throw ValueError(std::string(what) + ": non-finite value");
  }
}

template void require_finite(const Tensor<float>&, const char*);
template void require_finite(const Tensor<double>&, const char*);

}  // namespace binloc
