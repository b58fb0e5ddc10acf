#ifndef COMBOFILTER_CSV_HPP
#define COMBOFILTER_CSV_HPP

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "combofilter/experiment.hpp"

namespace combofilter {

/// Failure to create or write an output file.
class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Locale-independent, 17 significant digits ("inf", "-inf", "nan" for
/// non-finite values).
std::string format_double(double value);

/// Creates `dir` if needed and checks that files can be written into it.
void prepare_output_dir(const std::filesystem::path& dir);

void write_text(const std::filesystem::path& path, const std::string& text);

/// Header "n,emse_db,emse_raw", one row per sample.
void write_curve_csv(const std::filesystem::path& path, const LearningCurve& curve);

/// Header "n,lambda_mean,a_mean".
void write_mixing_csv(const std::filesystem::path& path, const MixingTrace& trace);

/// One row per algorithm with steady-state estimates and verdicts.
void write_report_csv(const std::filesystem::path& path, const MonteCarloResult& result);

/// Header "n,delta_db" with emse_db(a) - emse_db(b).
void write_delta_csv(const std::filesystem::path& path, const LearningCurve& a,
                     const LearningCurve& b);

struct SweepRow {
    double value{};
    double steady_state_db{};
    std::optional<std::size_t> convergence_time;
};

/// Header "value,steady_state_db,convergence_time"; -1 marks a curve that
/// never converged.
void write_sweep_summary(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

}  // namespace combofilter

#endif  // COMBOFILTER_CSV_HPP
