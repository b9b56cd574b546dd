#include "cnls/gauss_rational.hpp"

#include <stdexcept>
#include <vector>

#include "cnls/errors.hpp"

namespace cnls {

GaussRational& GaussRational::operator/=(const GaussRational& o) {
    if (o.is_zero()) throw std::domain_error("GaussRational: division by zero");
    const mpq_class den = o.re_ * o.re_ + o.im_ * o.im_;
    mpq_class r = (re_ * o.re_ + im_ * o.im_) / den;
    mpq_class m = (im_ * o.re_ - re_ * o.im_) / den;
    re_ = std::move(r);
    im_ = std::move(m);
    return *this;
}

std::string GaussRational::to_string() const { return re_.get_str() + " / " + im_.get_str(); }

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

mpq_class parse_rational(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw ParseError("empty rational");
    const std::size_t start = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    bool seen_slash = false;
    for (std::size_t i = start; i < t.size(); ++i) {
        if (t[i] == '/' && !seen_slash && i > start && i + 1 < t.size()) {
            seen_slash = true;
            continue;
        }
        if (t[i] < '0' || t[i] > '9') throw ParseError("malformed rational '" + t + "'");
    }
    if (start == t.size()) throw ParseError("malformed rational '" + t + "'");
    mpq_class q;
    if (q.set_str(t[0] == '+' ? t.substr(1) : t, 10) != 0) throw ParseError("malformed rational '" + t + "'");
    if (sgn(q.get_den()) == 0) throw ParseError("zero denominator in '" + t + "'");
    q.canonicalize();
    return q;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        out.push_back(s.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

}  // namespace

GaussRational GaussRational::parse(const std::string& raw) {
    std::string text;
    // Normalize the Unicode minus sign U+2212.
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (i + 2 < raw.size() && static_cast<unsigned char>(raw[i]) == 0xE2 &&
            static_cast<unsigned char>(raw[i + 1]) == 0x88 && static_cast<unsigned char>(raw[i + 2]) == 0x92) {
            text += '-';
            i += 2;
        } else {
            text += raw[i];
        }
    }
    text = trim(text);
    const auto spaced = text.find(" / ");
    if (spaced != std::string::npos)
        return {parse_rational(text.substr(0, spaced)), parse_rational(text.substr(spaced + 3))};
    const auto parts = split(text, '/');
    if (parts.size() == 1) return {parse_rational(parts[0]), 0};
    if (parts.size() == 2) return {parse_rational(parts[0]), parse_rational(parts[1])};
    if (parts.size() == 4)
        return {parse_rational(parts[0] + "/" + parts[1]), parse_rational(parts[2] + "/" + parts[3])};
    throw ParseError("ambiguous coefficient '" + text + "'; write 're / im'");
}

}  // namespace cnls
