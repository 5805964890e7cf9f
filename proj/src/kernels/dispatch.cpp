#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string_view>

#include "injury/kernels.hpp"

namespace injury::kernels {

namespace {

Backend detect() {
    if (const char* env = std::getenv("INJURYCAST_KERNELS"); env && std::string_view(env) == "scalar")
        return Backend::Scalar;
    return avx2_available() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
    static std::atomic<Backend> backend{detect()};
    return backend;
}

}  // namespace

std::string_view to_string(Backend backend) {
    return backend == Backend::Avx2 ? "avx2" : "scalar";
}

bool avx2_available() {
#if defined(INJURYCAST_HAVE_X86) && (defined(__GNUC__) || defined(__clang__))
    static const bool ok = [] {
        __builtin_cpu_init();
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    }();
    return ok;
#else
    return false;
#endif
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

bool set_backend(Backend backend) {
    if (backend == Backend::Avx2 && !avx2_available()) {
        current().store(Backend::Scalar);
        return false;
    }
    current().store(backend);
    return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    return active_backend() == Backend::Avx2 ? avx2::dot(a.data(), b.data(), a.size())
                                             : scalar::dot(a.data(), b.data(), a.size());
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    return active_backend() == Backend::Avx2
               ? avx2::squared_distance(a.data(), b.data(), a.size())
               : scalar::squared_distance(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    if (active_backend() == Backend::Avx2)
        avx2::axpy(alpha, x.data(), y.data(), x.size());
    else
        scalar::axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace injury::kernels
