#include "blockmaps/series_json.hpp"

#include <stdexcept>

namespace blockmaps {

EvalResult eval_real(const TruncSeries& s, const BigFixed& x) {
    int n = s.order();
    int d = x.digits();
    BigFixed acc(d);
    for (int k = n; k >= 0; --k) {
        acc = acc * x;
        acc += BigFixed::from_rat(s[k], d);
    }
    BigFixed tail = BigFixed::from_rat(s[n], d) * x.pow_int(n);
    EvalResult r{acc, tail.abs().mul_int(n > 0 ? n : 1)};
    return r;
}

nlohmann::json series_to_json(const TruncSeries& s) {
    nlohmann::json j;
    j["order"] = s.order();
    auto& arr = j["coeffs"] = nlohmann::json::array();
    for (int k = 0; k <= s.order(); ++k) arr.push_back(rat_to_string(s[k]));
    return j;
}

TruncSeries series_from_json(const nlohmann::json& j) {
    if (!j.contains("order") || !j.contains("coeffs"))
        throw std::invalid_argument("series json needs 'order' and 'coeffs'");
    int order = j.at("order").get<int>();
    const auto& arr = j.at("coeffs");
    if (!arr.is_array() || static_cast<int>(arr.size()) != order + 1)
        throw std::invalid_argument("series json: coeffs length must be order+1");
    std::vector<BigRat> cs;
    cs.reserve(arr.size());
    for (const auto& e : arr) cs.push_back(rat_from_string(e.get<std::string>()));
    return TruncSeries::from_coeffs(std::move(cs), order);
}

nlohmann::json biseries_to_json(const BiSeries& s) {
    nlohmann::json j;
    j["order"] = s.order();
    auto& arr = j["coeffs"] = nlohmann::json::array();
    for (int k = 0; k <= s.order(); ++k) {
        nlohmann::json row = nlohmann::json::array();
        for (const auto& c : s[k].raw()) row.push_back(rat_to_string(c));
        arr.push_back(std::move(row));
    }
    return j;
}

BiSeries biseries_from_json(const nlohmann::json& j) {
    if (!j.contains("order") || !j.contains("coeffs"))
        throw std::invalid_argument("series json needs 'order' and 'coeffs'");
    int order = j.at("order").get<int>();
    const auto& arr = j.at("coeffs");
    if (!arr.is_array() || static_cast<int>(arr.size()) != order + 1)
        throw std::invalid_argument("series json: coeffs length must be order+1");
    BiSeries s(order);
    for (int k = 0; k <= order; ++k) {
        const auto& row = arr.at(static_cast<size_t>(k));
        std::vector<BigRat> cs;
        cs.reserve(row.size());
        for (const auto& e : row) cs.push_back(rat_from_string(e.get<std::string>()));
        s.at(k) = UPoly::from_coeffs(std::move(cs));
    }
    return s;
}

} // namespace blockmaps
