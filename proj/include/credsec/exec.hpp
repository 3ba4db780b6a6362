#pragma once

namespace credsec {

/// Selects between the serial reference loop and the OpenMP loop of a
/// data-parallel kernel. Both produce identical output.
enum class Exec {
    serial,
    parallel,
};

}  // namespace credsec
