#pragma once
#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

namespace twophase {

// Shortest round-trip decimal rendering, locale independent: the same build
// and inputs always emit byte-identical artifacts.
std::string format_number(double x);

// Long-format table with deterministic formatting. All cells are stored as
// rendered strings so numeric and id columns mix freely.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(const std::vector<double>& cells);
    void add_row(std::vector<std::string> cells);
    std::string str() const;  // header line + rows, '\n' separated
};

// FNV-1a 64-bit content fingerprint rendered as 16 hex digits. Stable across
// platforms; used to key configs and artifacts in manifests (not
// cryptographic).
std::string content_hash(std::string_view bytes);

// Collects one experiment's artifacts under an output directory and writes a
// manifest capturing the config (with its content hash), input parameters,
// grid sizes, tolerances, and a checksummed list of every emitted file.
class ArtifactWriter {
  public:
    ArtifactWriter(std::string out_dir, std::string subcommand);

    void set_config(const nlohmann::json& config);
    nlohmann::json& inputs() { return manifest_["inputs"]; }
    nlohmann::json& grids() { return manifest_["grids"]; }
    nlohmann::json& tolerances() { return manifest_["tolerances"]; }

    // Writes bytes to <out_dir>/<name> and records {file, bytes, hash}.
    void write(const std::string& name, std::string_view bytes);

    // Writes <out_dir>/manifest.json; returns its path.
    std::string finalize();

  private:
    std::string dir_;
    nlohmann::json manifest_;
};

// 95% half-widths for the coefficients of a least-squares line y ~ c + a x
// from the regression residuals (Student-t quantile at n-2 degrees of
// freedom). Throws if fewer than three samples.
struct ConfidenceInterval {
    double intercept = 0.0;  // half-width around c
    double slope = 0.0;      // half-width around a
};

ConfidenceInterval fit_confidence(const std::vector<double>& x, const std::vector<double>& y,
                                  double c, double a);

} // namespace twophase
