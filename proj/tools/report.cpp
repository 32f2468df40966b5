#include "report.hpp"

#include <fstream>
#include <iostream>

#include "bilap/errors.hpp"
#include "bilap/io.hpp"

namespace bilap::cli {

ordered_json index_json(const Index& k, int n) {
    ordered_json a = ordered_json::array();
    for (int i = 0; i < n; ++i) a.push_back(k[std::size_t(i)]);
    return a;
}

ordered_json witness_json(const Witness& w, int n) {
    ordered_json j;
    j["M"] = w.M;
    j["trial"] = w.trial;
    j["x"] = index_json(w.x, n);
    j["y"] = index_json(w.y, n);
    j["quantity"] = w.quantity;
    j["bound"] = w.bound;
    j["ratio"] = w.bound > 0.0 ? w.quantity / w.bound : 0.0;
    return j;
}

ordered_json report_json(const EstimateReport& r) {
    ordered_json j;
    j["estimate_id"] = r.estimate_id;
    j["n"] = r.n;
    j["grids"] = r.grids;
    j["constant_per_grid"] = r.constant_per_grid;
    j["admissible_per_grid"] = r.admissible_per_grid;
    j["global_constant"] = r.global_constant;
    j["lower_bound"] = r.lower_bound;
    j["witness"] = witness_json(r.witness, r.n);
    ordered_json per = ordered_json::array();
    for (const auto& w : r.witness_per_grid) per.push_back(witness_json(w, r.n));
    j["witness_per_grid"] = per;
    j["spread"] = r.spread();
    j["stability_factor"] = r.stability_factor;
    j["verdict"] = to_string(r.verdict);
    j["empty"] = r.empty;
    j["excluded"] = r.excluded;
    j["exclusion_violations"] = r.exclusion_violations;
    if (!r.extras.empty()) {
        ordered_json e;
        for (const auto& [k, v] : r.extras) e[k] = v;
        j["extras"] = e;
    }
    return j;
}

void write_samples_csv(std::ostream& os, const std::vector<EstimateReport>& reports) {
    const int n = reports.empty() ? 2 : reports.front().n;
    os << "estimate_id,M,trial";
    for (int i = 1; i <= n; ++i) os << ",x" << i;
    for (int i = 1; i <= n; ++i) os << ",y" << i;
    os << ",quantity,bound,ratio\n";
    for (const auto& r : reports)
        for (const auto& s : r.samples) {
            os << r.estimate_id << ',' << s.M << ',' << s.trial;
            for (int i = 0; i < n; ++i) os << ',' << s.x[std::size_t(i)];
            for (int i = 0; i < n; ++i) os << ',' << s.y[std::size_t(i)];
            os << ',' << format_double(s.quantity) << ',' << format_double(s.bound) << ','
               << format_double(s.quantity / s.bound) << '\n';
        }
}

OutputFile::OutputFile(const std::filesystem::path& file) {
    if (file.empty()) return;
    auto f = std::make_unique<std::ofstream>(file, std::ios::binary);
    if (!*f) throw ParameterError("cannot open output file " + file.string());
    owned_ = std::move(f);
}

std::ostream& OutputFile::stream() { return owned_ ? *owned_ : std::cout; }

void emit(const std::filesystem::path& file, const std::string& text) {
    OutputFile out(file);
    out.stream() << text << '\n';
    out.stream().flush();
}

}  // namespace bilap::cli
