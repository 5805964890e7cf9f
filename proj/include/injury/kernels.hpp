#pragma once

// Dense double-precision kernels used by the k-NN search (oversampling) and the
// logistic-regression solver. Each kernel has a portable scalar reference and an
// AVX2+FMA variant; the active backend is chosen once at startup from CPUID and can
// be pinned with set_backend() or the INJURYCAST_KERNELS=scalar environment variable.

#include <cstddef>
#include <span>
#include <string_view>

namespace injury::kernels {

enum class Backend { Scalar, Avx2 };

std::string_view to_string(Backend backend);

/// True when the running CPU supports AVX2 and FMA and the build targets x86-64.
bool avx2_available();

Backend active_backend();

/// Pin a backend. Requesting Avx2 on a machine without it leaves Scalar active and
/// returns false.
bool set_backend(Backend backend);

double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace avx2

}  // namespace injury::kernels
