#include "mrc/types.hpp"

namespace mrc {

std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::Bull: return "bull";
        case Regime::Volatile: return "volatile";
        case Regime::Bear: return "bear";
    }
    return "volatile";
}

Regime regime_from_string(std::string_view s) {
    if (s == "bull") return Regime::Bull;
    if (s == "volatile") return Regime::Volatile;
    if (s == "bear") return Regime::Bear;
    throw Error("unknown regime label '" + std::string(s) + "'");
}

Vector Portfolio::stacked() const {
    Vector v(assets.size() + 1);
    v.head(assets.size()) = assets;
    v(assets.size()) = cash;
    return v;
}

Portfolio Portfolio::from_stacked(const Vector& v) {
    return {v.head(v.size() - 1), v(v.size() - 1)};
}

bool Portfolio::feasible(double w_max, double c_max, double tol) const {
    if (cash < -tol || cash > c_max + tol) return false;
    if (assets.size() > 0 && (assets.minCoeff() < -tol || assets.maxCoeff() > w_max + tol)) return false;
    return std::abs(total() - 1.0) <= tol;
}

}  // namespace mrc
