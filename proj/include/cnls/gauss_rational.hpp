#pragma once

#include <complex>
#include <string>

#include <gmpxx.h>

namespace cnls {

/// Exact complex number with rational real and imaginary parts.
class GaussRational {
public:
    GaussRational() = default;
    GaussRational(long re) : re_(re), im_(0) {}
    GaussRational(mpq_class re, mpq_class im = 0) : re_(std::move(re)), im_(std::move(im)) {
        re_.canonicalize();
        im_.canonicalize();
    }

    static GaussRational i() { return {0, 1}; }

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    GaussRational conj() const { return {re_, -im_}; }
    std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

    GaussRational& operator+=(const GaussRational& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    GaussRational& operator-=(const GaussRational& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    GaussRational& operator*=(const GaussRational& o) {
        mpq_class r = re_ * o.re_ - im_ * o.im_;
        mpq_class m = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(m);
        return *this;
    }
    GaussRational& operator/=(const GaussRational& o);

    friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
    friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
    friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
    friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }
    friend GaussRational operator-(const GaussRational& a) { return {-a.re_, -a.im_}; }

    friend bool operator==(const GaussRational& a, const GaussRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }

    /// "re / im" with each part written as p or p/q.
    std::string to_string() const;
    /// Inverse of to_string; also accepts the compact forms "p/q" (re, im integers) and "p/q/r/s".
    static GaussRational parse(const std::string& text);

private:
    mpq_class re_{0};
    mpq_class im_{0};
};

}  // namespace cnls
