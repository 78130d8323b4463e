#pragma once

#include <iosfwd>

namespace srp {

// Entry point of the srpkit command line. Exit status: 0 success, 1 a
// module or I/O error (reported as one JSON record on `err`), 2 usage.
int run_cli(int argc, char** argv, char** envp, std::ostream& out, std::ostream& err);

}  // namespace srp
