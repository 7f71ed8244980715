#include "twophase/io.hpp"
#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <utility>

namespace twophase {

std::string format_number(double x) {
    std::array<char, 32> buf;
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (res.ec != std::errc{}) throw std::runtime_error("format_number: conversion failed");
    return std::string(buf.data(), res.ptr);
}

void CsvTable::add_row(const std::vector<double>& cells) {
    std::vector<std::string> row;
    row.reserve(cells.size());
    for (double c : cells) row.push_back(format_number(c));
    add_row(std::move(row));
}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns.size())
        throw std::invalid_argument("CsvTable: row width does not match the header");
    rows.push_back(std::move(cells));
}

std::string CsvTable::str() const {
    std::string out;
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (j) out += ',';
        out += columns[j];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out += ',';
            out += row[j];
        }
        out += '\n';
    }
    return out;
}

std::string content_hash(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = hex[h & 0xf];
        h >>= 4;
    }
    return out;
}

ArtifactWriter::ArtifactWriter(std::string out_dir, std::string subcommand)
    : dir_(std::move(out_dir)) {
    std::filesystem::create_directories(dir_);
    manifest_["subcommand"] = std::move(subcommand);
    manifest_["inputs"] = nlohmann::json::object();
    manifest_["grids"] = nlohmann::json::object();
    manifest_["tolerances"] = nlohmann::json::object();
    manifest_["artifacts"] = nlohmann::json::array();
}

void ArtifactWriter::set_config(const nlohmann::json& config) {
    manifest_["config"] = config;
    manifest_["config_hash"] = content_hash(config.dump());
}

void ArtifactWriter::write(const std::string& name, std::string_view bytes) {
    auto path = std::filesystem::path(dir_) / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("ArtifactWriter: cannot open " + path.string());
    os.write(bytes.data(), (std::streamsize)bytes.size());
    os.close();
    manifest_["artifacts"].push_back({{"file", name},
                                      {"bytes", bytes.size()},
                                      {"hash", content_hash(bytes)}});
}

std::string ArtifactWriter::finalize() {
    auto path = std::filesystem::path(dir_) / "manifest.json";
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("ArtifactWriter: cannot open " + path.string());
    os << manifest_.dump(2) << "\n";
    return path.string();
}

ConfidenceInterval fit_confidence(const std::vector<double>& x, const std::vector<double>& y,
                                  double c, double a) {
    std::size_t n = x.size();
    if (n != y.size() || n < 3)
        throw std::invalid_argument("fit_confidence: need at least three samples");
    // t_{0.975, dof} for dof = 1..30, then the normal quantile
    static const double tq[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306,
                                2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
                                2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
                                2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
    std::size_t dof = n - 2;
    double t = dof <= 30 ? tq[dof - 1] : 1.960;

    double rss = 0.0, sx = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = y[i] - (c + a * x[i]);
        rss += r * r;
        sx += x[i];
        sxx += x[i] * x[i];
    }
    double s2 = rss / (double)dof;
    double det = (double)n * sxx - sx * sx;
    if (det <= 0.0) throw std::invalid_argument("fit_confidence: degenerate abscissae");
    ConfidenceInterval ci;
    ci.intercept = t * std::sqrt(s2 * sxx / det);
    ci.slope = t * std::sqrt(s2 * (double)n / det);
    return ci;
}

} // namespace twophase
