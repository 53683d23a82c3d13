// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pnr {

std::string_view trim(std::string_view s) noexcept;
bool is_blank(std::string_view s) noexcept;
std::vector<std::string> split_whitespace(std::string_view s);
std::string join(const std::vector<std::string> &parts, std::string_view sep);
std::size_t count_occurrences(std::string_view haystack, std::string_view needle) noexcept;
std::string ascii_lower(std::string_view s);

}  // namespace pnr
