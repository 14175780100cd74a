#include "ctrans/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace ctrans::kernels {

#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_kernels();

const KernelTable* avx2_table() {
  __builtin_cpu_init();
  if (!__builtin_cpu_supports("avx2")) return nullptr;
  return &avx2_kernels();
}
#else
const KernelTable* avx2_table() { return nullptr; }
#endif

const KernelTable& active() {
  static const KernelTable& chosen = []() -> const KernelTable& {
    const char* env = std::getenv("CTRANS_SIMD");
    if (env && std::string_view(env) == "scalar") return scalar_table();
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return chosen;
}

}  // namespace ctrans::kernels
