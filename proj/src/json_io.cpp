#include "ndhom/json_io.hpp"

#include <fstream>

#include "ndhom/errors.hpp"

namespace ndhom {

using nlohmann::json;

json terms_to_json(const std::vector<WaveTerm>& terms, int dim) {
    json arr = json::array();
    for (const WaveTerm& t : terms) {
        json k = json::array();
        for (int d = 0; d < dim; ++d) k.push_back(t.k[d]);
        arr.push_back({{"k", k},
                       {"phase", t.phase == Phase::Cos ? "cos" : "sin"},
                       {"amp", t.amp}});
    }
    return arr;
}

std::vector<WaveTerm> terms_from_json(const json& j, int dim) {
    if (!j.is_array()) throw SpecError("terms must be an array");
    std::vector<WaveTerm> terms;
    for (const json& tj : j) {
        WaveTerm t;
        const json& k = tj.at("k");
        if (static_cast<int>(k.size()) != dim)
            throw SpecError("wavevector length does not match dimension");
        for (int d = 0; d < dim; ++d) t.k[d] = k[d].get<int>();
        const std::string ph = tj.at("phase").get<std::string>();
        if (ph == "cos") t.phase = Phase::Cos;
        else if (ph == "sin") t.phase = Phase::Sin;
        else throw SpecError("phase must be 'cos' or 'sin'");
        t.amp = tj.at("amp").get<double>();
        terms.push_back(t);
    }
    return terms;
}

namespace {

int default_resolution(const std::vector<WaveTerm>& terms, int dim) {
    int need = 2 * (max_abs_component(terms) + 1);
    int res = dim == 3 ? 32 : 64;
    while (res < need) res *= 2;
    return res;
}

} // namespace

json scalar_field_to_json(const ScalarField& f, double amp_tol) {
    json j;
    j["dimension"] = f.dimension();
    j["resolution"] = f.resolution();
    j["terms"] = terms_to_json(f.spectral_terms(amp_tol), f.dimension());
    return j;
}

ScalarField scalar_field_from_json(const json& j) {
    const int dim = j.at("dimension").get<int>();
    if (dim < 1 || dim > 3) throw SpecError("dimension must be 1, 2 or 3");
    auto terms = terms_from_json(j.at("terms"), dim);
    const int res = j.contains("resolution") ? j.at("resolution").get<int>()
                                             : default_resolution(terms, dim);
    return ScalarField::from_terms(dim, std::move(terms), res);
}

json coefficient_field_to_json(const CoefficientField& A, double amp_tol) {
    const int n = A.dimension();
    json entries = json::object();
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) {
            const std::string key = std::to_string(k + 1) + std::to_string(l + 1);
            entries[key] = terms_to_json(A.entry(k, l).spectral_terms(amp_tol), n);
        }
    json j;
    j["dimension"] = n;
    j["resolution"] = A.resolution();
    j["entries"] = entries;
    return j;
}

CoefficientField coefficient_field_from_json(const json& j) {
    const int n = j.at("dimension").get<int>();
    if (n < 1 || n > 3) throw SpecError("dimension must be 1, 2 or 3");
    const json& entries = j.at("entries");
    std::vector<ScalarField> upper;
    int res = j.contains("resolution") ? j.at("resolution").get<int>() : 0;
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) {
            const std::string key = std::to_string(k + 1) + std::to_string(l + 1);
            const std::string alt = std::to_string(l + 1) + std::to_string(k + 1);
            const json* tj = nullptr;
            if (entries.contains(key)) tj = &entries.at(key);
            else if (entries.contains(alt)) tj = &entries.at(alt);
            else throw SpecError("missing matrix entry " + key);
            auto terms = terms_from_json(*tj, n);
            const int r = res > 0 ? res : default_resolution(terms, n);
            upper.push_back(ScalarField::from_terms(n, std::move(terms), r));
        }
    return CoefficientField::from_upper(n, std::move(upper));
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw SpecError("JSON parse error in " + path + ": " + e.what());
    }
    return j;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw SpecError("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

} // namespace ndhom
