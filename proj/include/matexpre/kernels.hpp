// SPDX-License-Identifier: Apache-2.0

#ifndef MATEXPRE_KERNELS_HPP
#define MATEXPRE_KERNELS_HPP

#include <span>

#include "matexpre/sparse.hpp"

// Data-parallel vector and SpMV kernels.
//
// The functions in `kernels` are OpenMP-parallel. Reductions are computed
// over fixed-size chunks whose partial sums are combined serially in chunk
// order, so every result is bitwise identical for any thread count. The
// `kernels::serial` namespace holds plain single-loop reference versions kept
// for testing and benchmarking. Callers are responsible for matching lengths.

namespace matexpre::kernels
{

/// Elements per reduction chunk.
inline constexpr std::size_t reduction_chunk = 4096;

void spmv(const CsrMatrix& A, std::span<const Complex> x, std::span<Complex> y);

/// y += a * x
void axpy(Complex a, std::span<const Complex> x, std::span<Complex> y);

/// y = x + b * y
void xpby(std::span<const Complex> x, Complex b, std::span<Complex> y);

void scale(Complex a, std::span<Complex> x);

void copy(std::span<const Complex> x, std::span<Complex> y);

void fill_zero(std::span<Complex> x);

/// sum conj(x[k]) y[k]
Complex dot_conj(std::span<const Complex> x, std::span<const Complex> y);

/// sum x[k] w[k] y[k] without conjugation (weighted bilinear form).
Complex dot_weighted(std::span<const Complex> x, std::span<const Complex> w,
                     std::span<const Complex> y);

double norm2(std::span<const Complex> x);

/// out[i] = dot_conj(qs[i], w) for every i, reading w once. Each qs[i]
/// points at w.size() elements.
void dot_conj_many(std::span<const Complex* const> qs, std::span<const Complex> w,
                   std::span<Complex> out);

/// y -= sum_i c[i] qs[i] in one sweep; returns norm2 of the updated y.
double subtract_combination(std::span<const Complex* const> qs, std::span<const Complex> c,
                            std::span<Complex> y);

/// Sets the OpenMP thread count from MATEXPRE_NUM_THREADS when present.
/// Returns the thread count in effect.
int configure_threads_from_env();

namespace serial
{

void spmv(const CsrMatrix& A, std::span<const Complex> x, std::span<Complex> y);
void axpy(Complex a, std::span<const Complex> x, std::span<Complex> y);
void xpby(std::span<const Complex> x, Complex b, std::span<Complex> y);
void scale(Complex a, std::span<Complex> x);
Complex dot_conj(std::span<const Complex> x, std::span<const Complex> y);
Complex dot_weighted(std::span<const Complex> x, std::span<const Complex> w,
                     std::span<const Complex> y);
double norm2(std::span<const Complex> x);
void dot_conj_many(std::span<const Complex* const> qs, std::span<const Complex> w,
                   std::span<Complex> out);
double subtract_combination(std::span<const Complex* const> qs, std::span<const Complex> c,
                            std::span<Complex> y);

}  // namespace serial

}  // namespace matexpre::kernels

#endif  // MATEXPRE_KERNELS_HPP
