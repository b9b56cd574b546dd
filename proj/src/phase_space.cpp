#include "cnls/phase_space.hpp"

#include "cnls/errors.hpp"

namespace cnls {

double norm_s(const ModeSequence<cplx>& x, double s) {
    double acc = 0.0;
    for (int j = -x.radius(); j <= x.radius(); ++j) acc += sobolev_weight(j, s) * std::norm(x[j]);
    return std::sqrt(acc);
}

double norm_s(const FourierState& state, double s) {
    double acc = 0.0;
    for (int j = -state.J(); j <= state.J(); ++j)
        acc += sobolev_weight(j, s) * (std::norm(state.a()[j]) + std::norm(state.b()[j]));
    return std::sqrt(acc);
}

std::pair<double, double> partial_masses(const FourierState& state) {
    double lu = 0.0, lv = 0.0;
    for (int j = -state.J(); j <= state.J(); ++j) {
        lu += std::norm(state.a()[j]);
        lv += std::norm(state.b()[j]);
    }
    return {lu, lv};
}

double mass(const FourierState& state) {
    auto [lu, lv] = partial_masses(state);
    return lu + lv;
}

double momentum(const FourierState& state) {
    double m = 0.0;
    for (int j = -state.J(); j <= state.J(); ++j)
        m += j * (std::norm(state.a()[j]) + std::norm(state.b()[j]));
    return m;
}

FourierState rotate_phases(const FourierState& state, double phi, double psi) {
    FourierState out = state;
    const cplx eu = std::polar(1.0, phi), ev = std::polar(1.0, psi);
    for (int j = -state.J(); j <= state.J(); ++j) {
        out.a()[j] *= eu;
        out.b()[j] *= ev;
    }
    return out;
}

FourierState shift_indices(const FourierState& state, int shift) {
    FourierState out(state.J());
    for (int j = -state.J(); j <= state.J(); ++j) {
        const int k = j + shift;
        if (!out.a().contains(k)) continue;
        out.a()[k] = state.a()[j];
        out.b()[k] = state.b()[j];
    }
    return out;
}

FourierState conj(const FourierState& state) {
    FourierState out = state;
    for (int j = -state.J(); j <= state.J(); ++j) {
        out.a()[j] = std::conj(out.a()[j]);
        out.b()[j] = std::conj(out.b()[j]);
    }
    return out;
}

namespace {

nlohmann::json seq_to_json(const ModeSequence<cplx>& x) {
    auto arr = nlohmann::json::array();
    for (int j = -x.radius(); j <= x.radius(); ++j) arr.push_back({x[j].real(), x[j].imag()});
    return arr;
}

ModeSequence<cplx> seq_from_json(const nlohmann::json& arr, int J, const char* name) {
    if (!arr.is_array() || arr.size() != static_cast<std::size_t>(2 * J + 1))
        throw ParseError(std::string("state JSON: '") + name + "' must hold 2J+1 entries");
    ModeSequence<cplx> x(J);
    for (int j = -J; j <= J; ++j) {
        const auto& e = arr[static_cast<std::size_t>(j + J)];
        if (!e.is_array() || e.size() != 2) throw ParseError("state JSON: entries must be [re, im]");
        x[j] = {e[0].get<double>(), e[1].get<double>()};
    }
    return x;
}

}  // namespace

nlohmann::json to_json(const FourierState& state) {
    return {{"J", state.J()}, {"a", seq_to_json(state.a())}, {"b", seq_to_json(state.b())}};
}

FourierState state_from_json(const nlohmann::json& j) {
    for (const char* key : {"J", "a", "b"})
        if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("state JSON: missing '") + key + "'");
    try {
        const int J = j.at("J").get<int>();
        if (J < 0) throw ParseError("state JSON: negative J");
        return FourierState(seq_from_json(j.at("a"), J, "a"), seq_from_json(j.at("b"), J, "b"));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("state JSON: ") + e.what());
    }
}

}  // namespace cnls
