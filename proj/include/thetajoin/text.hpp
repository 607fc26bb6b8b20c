#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace thetajoin {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
void strip_cr(std::string& line);
bool is_identifier(std::string_view s);

}  // namespace thetajoin
