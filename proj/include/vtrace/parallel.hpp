#pragma once

namespace vtrace {

// Worker count for the OpenMP kernels. 0 means the OpenMP runtime default.
// Results are required to be identical for every setting; tests rely on it.
void set_worker_threads(int n);
int worker_threads();

}  // namespace vtrace
