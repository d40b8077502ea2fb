#ifndef RELINK_REPORT_HPP
#define RELINK_REPORT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace relink {

/// One measurement row: linkability ratios of one (scheme, candidate-set,
/// AR-size, beta) cell. Fractions always satisfy top1 <= top5 <= top10.
struct ReportRow {
    std::string scheme;            // "uni", "bi", "hashtag" or "combined"
    std::size_t user_count = 0;    // size of the candidate set the model ranks over
    std::size_t ar_size = 0;
    std::optional<double> beta;    // set only for combined rows
    double top1 = 0.0;
    double top5 = 0.0;
    double top10 = 0.0;
    std::size_t n_ars = 0;         // anonymous batches evaluated for this row
    std::size_t n_empty_ars = 0;   // batches with no tokens, counted as failures
};

struct LinkabilityReport {
    std::vector<ReportRow> rows;

    void append(const LinkabilityReport& other);

    /// CSV with the fixed header
    /// scheme,user_count,ar_size,beta,top1,top5,top10,n_ars,n_empty_ars
    /// Fractions use 6 decimals and beta uses %g, so identical reports
    /// serialize byte-identically.
    std::string to_csv() const;
    void write_csv(const std::filesystem::path& path) const;

    /// Aligned human-readable table.
    void print_table(std::ostream& os) const;
};

}  // namespace relink

#endif  // RELINK_REPORT_HPP
