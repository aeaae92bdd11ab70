#include "rfpa/exec.hpp"

#include <omp.h>

namespace rfpa {

void set_worker_threads(int n) {
    if (n > 0) omp_set_num_threads(n);
}

} // namespace rfpa
