#pragma once

// File formats: snapshot and series CSVs written with round-trip precision,
// and the JSON payloads (run result, constants, validation report, verdict,
// sweep table, manifest). Identical inputs produce byte-identical files;
// wall-clock data is confined to the manifest.

#include <fstream>
#include <optional>
#include <string>

#include "thinfilm/classify.hpp"
#include "thinfilm/core.hpp"
#include "thinfilm/evolve.hpp"
#include "thinfilm/sharp.hpp"
#include "thinfilm/steady.hpp"

namespace thinfilm {

std::string format_double(double v); // %.17g, round-trip exact

// Snapshot CSV: "# t=<time> m=<m>" comment, "x,u" header, then the samples.
void write_snapshot(const std::string& path, const Field& f, double m);
Field read_snapshot(const std::string& path, double* m_out = nullptr);

// Series CSV with the exact header
// t,dt,mass,F,m2,norm_m1,grad_l2,fisher,u_max,u_min.
void write_series_csv(const std::string& path, const RunRecord& rec);

void write_result_json(const std::string& path, const RunRecord& rec,
                       const ModelParams& params);

void write_constants_json(const std::string& path, const SharpConstants& c);

void write_validation_json(const std::string& path, const SteadyProfile& p,
                           const ValidationReport& rep);

void write_verdict_json(const std::string& path, const ThresholdVerdict& v,
                        double m, std::optional<double> lambda);

// Incremental sweep table: the header is written on open and each row is
// flushed immediately, so partial sweeps remain recoverable.
class SweepWriter {
  public:
    explicit SweepWriter(const std::string& path);
    void write_row(const SweepCell& cell);

  private:
    std::ofstream out_;
};

void write_manifest(const std::string& path, const std::string& command,
                    const std::string& config_echo_json, double wall_seconds);

} // namespace thinfilm
