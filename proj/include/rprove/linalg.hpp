#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <numeric>
#include <optional>

#include <Eigen/Dense>

#include "rprove/interval.hpp"

namespace rprove {

template <std::size_t N>
using Vec = std::array<double, N>;
template <std::size_t N>
using IVec = std::array<Interval, N>;
template <std::size_t R, std::size_t C>
using Mat = std::array<std::array<double, C>, R>;
template <std::size_t R, std::size_t C>
using IMat = std::array<std::array<Interval, C>, R>;

namespace la {

template <std::size_t N>
Mat<N, N> identity()
{
    Mat<N, N> m{};
    for (std::size_t i = 0; i < N; ++i) {
        m[i][i] = 1.0;
    }
    return m;
}

template <std::size_t N>
IVec<N> to_interval(const Vec<N>& v)
{
    IVec<N> r;
    for (std::size_t i = 0; i < N; ++i) {
        r[i] = Interval(v[i]);
    }
    return r;
}

template <std::size_t N>
Vec<N> mid(const IVec<N>& v)
{
    Vec<N> r;
    for (std::size_t i = 0; i < N; ++i) {
        r[i] = v[i].mid();
    }
    return r;
}

template <std::size_t R, std::size_t C>
Mat<R, C> mid(const IMat<R, C>& m)
{
    Mat<R, C> r;
    for (std::size_t i = 0; i < R; ++i) {
        for (std::size_t j = 0; j < C; ++j) {
            r[i][j] = m[i][j].mid();
        }
    }
    return r;
}

template <std::size_t N>
IVec<N> add(const IVec<N>& a, const IVec<N>& b)
{
    IVec<N> r;
    for (std::size_t i = 0; i < N; ++i) {
        r[i] = a[i] + b[i];
    }
    return r;
}

template <std::size_t N>
IVec<N> sub(const IVec<N>& a, const IVec<N>& b)
{
    IVec<N> r;
    for (std::size_t i = 0; i < N; ++i) {
        r[i] = a[i] - b[i];
    }
    return r;
}

template <std::size_t R, std::size_t C>
IVec<R> mul(const Mat<R, C>& m, const IVec<C>& x)
{
    IVec<R> r;
    for (std::size_t i = 0; i < R; ++i) {
        Interval acc(0.0);
        for (std::size_t j = 0; j < C; ++j) {
            acc += Interval(m[i][j]) * x[j];
        }
        r[i] = acc;
    }
    return r;
}

template <std::size_t R, std::size_t C>
IVec<R> mul(const IMat<R, C>& m, const IVec<C>& x)
{
    IVec<R> r;
    for (std::size_t i = 0; i < R; ++i) {
        Interval acc(0.0);
        for (std::size_t j = 0; j < C; ++j) {
            acc += m[i][j] * x[j];
        }
        r[i] = acc;
    }
    return r;
}

template <std::size_t R, std::size_t K, std::size_t C>
IMat<R, C> mul(const IMat<R, K>& a, const Mat<K, C>& b)
{
    IMat<R, C> r;
    for (std::size_t i = 0; i < R; ++i) {
        for (std::size_t j = 0; j < C; ++j) {
            Interval acc(0.0);
            for (std::size_t k = 0; k < K; ++k) {
                acc += a[i][k] * Interval(b[k][j]);
            }
            r[i][j] = acc;
        }
    }
    return r;
}

template <std::size_t R, std::size_t K, std::size_t C>
IMat<R, C> mul(const IMat<R, K>& a, const IMat<K, C>& b)
{
    IMat<R, C> r;
    for (std::size_t i = 0; i < R; ++i) {
        for (std::size_t j = 0; j < C; ++j) {
            Interval acc(0.0);
            for (std::size_t k = 0; k < K; ++k) {
                acc += a[i][k] * b[k][j];
            }
            r[i][j] = acc;
        }
    }
    return r;
}

template <std::size_t N>
bool subset(const IVec<N>& inner, const IVec<N>& outer)
{
    for (std::size_t i = 0; i < N; ++i) {
        if (!outer[i].contains(inner[i])) {
            return false;
        }
    }
    return true;
}

template <std::size_t N>
IVec<N> hull(const IVec<N>& a, const IVec<N>& b)
{
    IVec<N> r;
    for (std::size_t i = 0; i < N; ++i) {
        r[i] = rprove::hull(a[i], b[i]);
    }
    return r;
}

// Componentwise intersection; returns the first argument if some component
// is disjoint (cannot happen when both enclose the same point set).
template <std::size_t N>
IVec<N> intersect_or_first(const IVec<N>& a, const IVec<N>& b)
{
    IVec<N> r;
    for (std::size_t i = 0; i < N; ++i) {
        const auto c = rprove::intersect(a[i], b[i]);
        if (!c) {
            return a;
        }
        r[i] = *c;
    }
    return r;
}

template <std::size_t N>
double max_width(const IVec<N>& v)
{
    double w = 0.0;
    for (const auto& x : v) {
        w = std::max(w, x.width());
    }
    return w;
}

template <std::size_t N>
using EigenMat = Eigen::Matrix<double, static_cast<int>(N), static_cast<int>(N)>;

template <std::size_t N>
EigenMat<N> to_eigen(const Mat<N, N>& m)
{
    EigenMat<N> e;
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
            e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i][j];
        }
    }
    return e;
}

template <std::size_t N>
Mat<N, N> from_eigen(const EigenMat<N>& e)
{
    Mat<N, N> m;
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
            m[i][j] = e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return m;
}

// Rigorous enclosure of M^{-1} given an approximate inverse R. With
// E = I - R M and ||E||_inf = e < 1, M^{-1} = (I - E)^{-1} R lies in
// R + D where |D_ij| <= e / (1 - e) * max_k |R_kj|.
template <std::size_t N>
std::optional<IMat<N, N>> enclose_inverse(const Mat<N, N>& m, const Mat<N, N>& approx_inv)
{
    using namespace rounding;
    IMat<N, N> rm;
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
            rm[i][j] = Interval(approx_inv[i][j]);
        }
    }
    const IMat<N, N> prod = mul(rm, m);
    double e = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            const Interval eij = Interval(i == j ? 1.0 : 0.0) - prod[i][j];
            row = add_up(row, eij.mag());
        }
        e = std::max(e, row);
    }
    if (!(e < 0.5)) {
        return std::nullopt;
    }
    const double factor = div_up(e, sub_down(1.0, e));
    IMat<N, N> out;
    for (std::size_t j = 0; j < N; ++j) {
        double colmax = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            colmax = std::max(colmax, std::fabs(approx_inv[k][j]));
        }
        const double d = mul_up(factor, colmax);
        for (std::size_t i = 0; i < N; ++i) {
            out[i][j] = inflate(Interval(approx_inv[i][j]), d);
        }
    }
    return out;
}

template <std::size_t N>
Mat<N, N> transpose(const Mat<N, N>& m)
{
    Mat<N, N> t;
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
            t[i][j] = m[j][i];
        }
    }
    return t;
}

template <std::size_t N>
Mat<N, N> approx_inverse(const Mat<N, N>& m)
{
    return from_eigen<N>(to_eigen<N>(m).fullPivLu().inverse());
}

// Orthonormal Q from the QR factorisation of m with columns reordered by
// decreasing weight (Lohner's ordering: longest edge of the parallelepiped
// first).
template <std::size_t N>
Mat<N, N> ordered_qr_basis(const Mat<N, N>& m, const std::array<double, N>& weights)
{
    std::array<std::size_t, N> order;
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::array<double, N> len{};
    for (std::size_t j = 0; j < N; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            s += m[i][j] * m[i][j];
        }
        len[j] = std::sqrt(s) * weights[j];
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return len[a] > len[b]; });
    EigenMat<N> perm;
    for (std::size_t j = 0; j < N; ++j) {
        for (std::size_t i = 0; i < N; ++i) {
            perm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i][order[j]];
        }
    }
    Eigen::HouseholderQR<EigenMat<N>> qr(perm);
    EigenMat<N> q = qr.householderQ();
    return from_eigen<N>(q);
}

} // namespace la
} // namespace rprove
