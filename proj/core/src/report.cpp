#include "relink/report.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace relink {

namespace {

std::string fraction(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string beta_field(const std::optional<double>& beta) {
    if (!beta) return "";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", *beta);
    return buf;
}

}  // namespace

void LinkabilityReport::append(const LinkabilityReport& other) {
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

std::string LinkabilityReport::to_csv() const {
    std::string out = "scheme,user_count,ar_size,beta,top1,top5,top10,n_ars,n_empty_ars\n";
    for (const ReportRow& r : rows) {
        out += r.scheme;
        out += ',' + std::to_string(r.user_count);
        out += ',' + std::to_string(r.ar_size);
        out += ',' + beta_field(r.beta);
        out += ',' + fraction(r.top1);
        out += ',' + fraction(r.top5);
        out += ',' + fraction(r.top10);
        out += ',' + std::to_string(r.n_ars);
        out += ',' + std::to_string(r.n_empty_ars);
        out += '\n';
    }
    return out;
}

void LinkabilityReport::write_csv(const std::filesystem::path& path) const {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error(path.string() + ": cannot open for writing");
    const std::string csv = to_csv();
    file.write(csv.data(), static_cast<std::streamsize>(csv.size()));
    if (!file) throw std::runtime_error(path.string() + ": write failed");
}

void LinkabilityReport::print_table(std::ostream& os) const {
    os << std::left << std::setw(10) << "scheme" << std::right << std::setw(12) << "users"
       << std::setw(9) << "ar" << std::setw(8) << "beta" << std::setw(10) << "top1"
       << std::setw(10) << "top5" << std::setw(10) << "top10" << std::setw(9) << "ars"
       << std::setw(8) << "empty" << '\n';
    for (const ReportRow& r : rows) {
        const std::string beta = r.beta ? beta_field(r.beta) : "-";
        os << std::left << std::setw(10) << r.scheme << std::right << std::setw(12) << r.user_count
           << std::setw(9) << r.ar_size << std::setw(8) << beta << std::setw(10) << fraction(r.top1)
           << std::setw(10) << fraction(r.top5) << std::setw(10) << fraction(r.top10)
           << std::setw(9) << r.n_ars << std::setw(8) << r.n_empty_ars << '\n';
    }
}

}  // namespace relink
