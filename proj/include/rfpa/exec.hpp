// exec.hpp - execution-policy switch for the OpenMP kernels.
//
// Every parallel kernel keeps a serial path that performs the identical
// per-unit computation in the identical order; the two must produce
// bit-identical results, which the tests assert.

#pragma once

namespace rfpa {

enum class Exec { serial, parallel };

/// Clamp OpenMP to `n` threads when n > 0; no-op otherwise.
void set_worker_threads(int n);

} // namespace rfpa
