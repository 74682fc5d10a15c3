#pragma once

#include <iosfwd>

namespace wdflow::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kIoError = 2, kBackendError = 3 };

int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace wdflow::cli
