// Persistent FunctionStack container: "CSWS" magic, versioned header,
// little-endian 64-bit floats in (t, p, row, col) order. Round trips are
// bit-exact.
////////////////////////////////////////////////////////////////////////////////
#pragma once

#include <string>

#include "csws/config.hpp"
#include "csws/types.hpp"

namespace csws {

// Throws IoError when the file cannot be written.
void write_stack(const std::string& path, const FunctionStack& stack);

// Throws IoError when unreadable, ArtifactError on bad magic, version or
// inconsistent payload size.
FunctionStack read_stack(const std::string& path);

}  // namespace csws
