#pragma once

#include <ostream>

namespace thetajoin::cli {

// Exit codes: 0 success, 1 runtime failure, 2 usage error.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace thetajoin::cli
