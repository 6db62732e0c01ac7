#include "lagconn/kernels.hpp"

#include <atomic>

#include <omp.h>

namespace lagconn {

namespace {
std::atomic<ExecPolicy> g_policy{ExecPolicy::Serial};
}

ExecPolicy default_policy() { return g_policy.load(); }
void set_default_policy(ExecPolicy policy) { g_policy.store(policy); }
int max_threads() { return omp_get_max_threads(); }

}  // namespace lagconn
