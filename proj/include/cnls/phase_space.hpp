#pragma once

#include <cassert>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "json.hpp"

namespace cnls {

using cplx = std::complex<double>;

enum class Species { u = 0, v = 1 };

/// Coefficients c_j for j in [-radius, radius], stored densely from -radius upward.
template <class T>
class ModeSequence {
public:
    ModeSequence() = default;
    explicit ModeSequence(int radius) : radius_(radius), c_(static_cast<std::size_t>(2 * radius + 1), T{}) {
        if (radius < 0) throw std::invalid_argument("ModeSequence: negative radius");
    }
    ModeSequence(int radius, std::vector<T> values) : radius_(radius), c_(std::move(values)) {
        if (c_.size() != static_cast<std::size_t>(2 * radius + 1))
            throw std::invalid_argument("ModeSequence: size does not match radius");
    }

    int radius() const { return radius_; }
    bool contains(int j) const { return j >= -radius_ && j <= radius_; }

    T& operator[](int j) {
        assert(contains(j));
        return c_[static_cast<std::size_t>(j + radius_)];
    }
    const T& operator[](int j) const {
        assert(contains(j));
        return c_[static_cast<std::size_t>(j + radius_)];
    }
    /// Zero outside the stored band.
    T at_or_zero(int j) const { return contains(j) ? (*this)[j] : T{}; }

    std::span<T> values() { return c_; }
    std::span<const T> values() const { return c_; }

    friend bool operator==(const ModeSequence&, const ModeSequence&) = default;

private:
    int radius_ = 0;
    std::vector<T> c_;
};

/// (x * y)_l = sum_{i+j=l} x_i y_j on the full band [-(Jx+Jy), Jx+Jy].
template <class T>
ModeSequence<T> convolve(const ModeSequence<T>& x, const ModeSequence<T>& y) {
    ModeSequence<T> out(x.radius() + y.radius());
    for (int i = -x.radius(); i <= x.radius(); ++i) {
        const T& xi = x[i];
        for (int j = -y.radius(); j <= y.radius(); ++j) out[i + j] += xi * y[j];
    }
    return out;
}

/// Galerkin projection onto [-J, J].
template <class T>
ModeSequence<T> truncate(const ModeSequence<T>& x, int J) {
    ModeSequence<T> out(J);
    for (int j = -J; j <= J; ++j) out[j] = x.at_or_zero(j);
    return out;
}

/// x~_j = x_{-j}
template <class T>
ModeSequence<T> reflect(const ModeSequence<T>& x) {
    ModeSequence<T> out(x.radius());
    for (int j = -x.radius(); j <= x.radius(); ++j) out[j] = x[-j];
    return out;
}

/// Truncated two-species state (a_j, b_j), |j| <= J.
template <class T>
class BasicFourierState {
public:
    BasicFourierState() = default;
    explicit BasicFourierState(int J) : a_(J), b_(J) {
        if (J < 0) throw std::invalid_argument("FourierState: negative truncation radius");
    }
    BasicFourierState(ModeSequence<T> a, ModeSequence<T> b) : a_(std::move(a)), b_(std::move(b)) {
        if (a_.radius() != b_.radius())
            throw std::invalid_argument("FourierState: species have different truncation radii");
    }

    int J() const { return a_.radius(); }
    int size() const { return 2 * J() + 1; }

    ModeSequence<T>& a() { return a_; }
    ModeSequence<T>& b() { return b_; }
    const ModeSequence<T>& a() const { return a_; }
    const ModeSequence<T>& b() const { return b_; }
    ModeSequence<T>& species(Species s) { return s == Species::u ? a_ : b_; }
    const ModeSequence<T>& species(Species s) const { return s == Species::u ? a_ : b_; }

    BasicFourierState& operator+=(const BasicFourierState& o) {
        check_same(o);
        for (int j = -J(); j <= J(); ++j) {
            a_[j] += o.a_[j];
            b_[j] += o.b_[j];
        }
        return *this;
    }
    BasicFourierState& operator-=(const BasicFourierState& o) {
        check_same(o);
        for (int j = -J(); j <= J(); ++j) {
            a_[j] -= o.a_[j];
            b_[j] -= o.b_[j];
        }
        return *this;
    }
    BasicFourierState& operator*=(const T& c) {
        for (int j = -J(); j <= J(); ++j) {
            a_[j] *= c;
            b_[j] *= c;
        }
        return *this;
    }
    friend BasicFourierState operator+(BasicFourierState x, const BasicFourierState& y) { return x += y; }
    friend BasicFourierState operator-(BasicFourierState x, const BasicFourierState& y) { return x -= y; }
    friend BasicFourierState operator*(const T& c, BasicFourierState x) { return x *= c; }

    friend bool operator==(const BasicFourierState&, const BasicFourierState&) = default;

private:
    void check_same(const BasicFourierState& o) const {
        if (o.J() != J()) throw std::invalid_argument("FourierState: truncation radius mismatch");
    }

    ModeSequence<T> a_;
    ModeSequence<T> b_;
};

using FourierState = BasicFourierState<cplx>;

/// Weight (1 + j^2)^s of the l^2_s norm.
inline double sobolev_weight(int j, double s) { return std::pow(1.0 + double(j) * double(j), s); }

/// sqrt(sum_j (1+j^2)^s |x_j|^2)
double norm_s(const ModeSequence<cplx>& x, double s);
/// sqrt(sum_j (1+j^2)^s (|a_j|^2 + |b_j|^2))
double norm_s(const FourierState& state, double s);

double mass(const FourierState& state);
double momentum(const FourierState& state);
std::pair<double, double> partial_masses(const FourierState& state);

/// Multiply species u by e^{i phi} and species v by e^{i psi}.
FourierState rotate_phases(const FourierState& state, double phi, double psi);
/// Move every coefficient from index j to j + shift (modes pushed out of the band are dropped).
FourierState shift_indices(const FourierState& state, int shift);

FourierState conj(const FourierState& state);

/// {"J": J, "a": [[re, im], ...], "b": [[re, im], ...]} in index order -J..J.
nlohmann::json to_json(const FourierState& state);
FourierState state_from_json(const nlohmann::json& j);

}  // namespace cnls
