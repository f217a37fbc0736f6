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

#ifndef BINLOC_KEYVALUE_HPP_
#define BINLOC_KEYVALUE_HPP_

#include <cstddef>
#include <map>
#include <string>

namespace binloc {

/// `key = value` lines. Blank lines and text after '#' are ignored; a
/// repeated key keeps the last value.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);
KeyValues read_key_values(const std::string& path);

bool parse_bool(const std::string& key, const std::string& value);
std::size_t parse_size(const std::string& key, const std::string& value);
double parse_double(const std::string& key, const std::string& value);

}  // namespace binloc

#endif  // BINLOC_KEYVALUE_HPP_
