#include "combofilter/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "combofilter/config.hpp"

namespace combofilter {

namespace fs = std::filesystem;

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void prepare_output_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw OutputError("cannot create output directory '" + dir.string() + "'");
    }
    const auto probe = dir / ".write_probe";
    {
        std::ofstream out(probe, std::ios::binary);
        if (!out) {
            throw OutputError("output directory '" + dir.string() + "' is not writable");
        }
    }
    fs::remove(probe, ec);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out) {
        throw OutputError("failed to write '" + path.string() + "'");
    }
}

namespace {

std::string fmt_time(const std::optional<std::size_t>& t) {
    return t ? std::to_string(*t) : std::string("-1");
}

}  // namespace

void write_curve_csv(const fs::path& path, const LearningCurve& curve) {
    std::string out = "n,emse_db,emse_raw\n";
    out.reserve(curve.mean_sq.size() * 48);
    for (std::size_t n = 0; n < curve.mean_sq.size(); ++n) {
        out += std::to_string(n);
        out += ',';
        out += format_double(emse_db(curve.mean_sq[n]));
        out += ',';
        out += format_double(curve.mean_sq[n]);
        out += '\n';
    }
    write_text(path, out);
}

void write_mixing_csv(const fs::path& path, const MixingTrace& trace) {
    std::string out = "n,lambda_mean,a_mean\n";
    out.reserve(trace.lambda_mean.size() * 48);
    for (std::size_t n = 0; n < trace.lambda_mean.size(); ++n) {
        out += std::to_string(n);
        out += ',';
        out += format_double(trace.lambda_mean[n]);
        out += ',';
        out += format_double(trace.a_mean[n]);
        out += '\n';
    }
    write_text(path, out);
}

void write_report_csv(const fs::path& path, const MonteCarloResult& result) {
    std::ostringstream out;
    out << "algorithm,kind,steady_state,steady_state_db,convergence_time,"
           "j_ex_1,j_ex_2,j_ex_12,j_ex,j_ex_u,lambda_mean,lambda_variance,"
           "lambda_predicted,mean_transfers,verdict\n";
    for (const auto& alg : result.algorithms) {
        out << alg.name << ',' << to_string(alg.kind) << ',' << format_double(alg.steady_state)
            << ',' << format_double(emse_db(alg.steady_state)) << ','
            << fmt_time(alg.convergence_time);
        if (alg.report) {
            const auto& r = *alg.report;
            for (double v : {r.j_ex_1, r.j_ex_2, r.j_ex_12, r.j_ex, r.j_ex_u, r.lambda_mean,
                             r.lambda_variance, r.lambda_predicted, alg.mean_transfers}) {
                out << ',' << format_double(v);
            }
            out << ',' << to_string(r.verdict);
        } else {
            out << ",,,,,,,,,,";
        }
        out << '\n';
    }
    write_text(path, out.str());
}

void write_delta_csv(const fs::path& path, const LearningCurve& a, const LearningCurve& b) {
    const auto da = a.db();
    const auto db = b.db();
    const std::size_t n_rows = std::min(da.size(), db.size());
    std::string out = "n,delta_db\n";
    for (std::size_t n = 0; n < n_rows; ++n) {
        out += std::to_string(n);
        out += ',';
        // Identical curves give exactly 0 even at the -inf sentinel.
        out += format_double(da[n] == db[n] ? 0.0 : da[n] - db[n]);
        out += '\n';
    }
    write_text(path, out);
}

void write_sweep_summary(const fs::path& path, const std::vector<SweepRow>& rows) {
    std::string out = "value,steady_state_db,convergence_time\n";
    for (const auto& row : rows) {
        out += format_double(row.value);
        out += ',';
        out += format_double(row.steady_state_db);
        out += ',';
        out += fmt_time(row.convergence_time);
        out += '\n';
    }
    write_text(path, out);
}

}  // namespace combofilter
