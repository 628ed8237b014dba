// Copyright 2026 The ebt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>

#include "ebt/grid.hpp"

namespace ebt {

/// Reads any PNG as 8-bit grayscale (color, palette, alpha, and 16-bit
/// inputs are converted). Throws IoError on unreadable or undecodable
/// files.
Grid<std::uint8_t> load_gray_png(const std::string& path);

/// Writes an 8-bit grayscale PNG.
void save_gray_png(const std::string& path, const Grid<std::uint8_t>& levels);

}  // namespace ebt
