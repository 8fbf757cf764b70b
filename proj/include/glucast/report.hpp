#pragma once

#include <string>
#include <vector>

#include "glucast/metrics.hpp"
#include "glucast/numerics.hpp"
#include "glucast/training.hpp"

namespace glucast::report {

struct ReportRow {
    std::string dataset;
    std::string method;  // e.g. "lstm", "naive", "ari(3,1)", "svr"
    int ph_min = 0;
    double rmse = 0.0;
    double cc = 0.0;
    double tl_min = 0.0;
    double fit_pct = 0.0;
    std::size_t n = 0;
    std::size_t hypo = 0;
    std::size_t hyper = 0;
};

ReportRow make_row(const std::string& dataset, const std::string& method, int ph_min,
                   const metrics::MetricsReport& r);

// All writers emit fixed-format numbers so identical runs produce
// byte-identical files.
void write_report_csv(const std::string& path, const std::vector<ReportRow>& rows);
void write_history_csv(const std::string& path, const training::History& history);
void write_sweep_csv(const std::string& path, const std::vector<training::SweepRow>& rows);
void write_summary_csv(const std::string& path,
                       const std::vector<metrics::DatasetSummary>& rows);

/// Static SVG line plot of actual vs predicted glucose over the test
/// span. Carries no timestamps or other volatile metadata.
void write_prediction_svg(const std::string& path, const Vec& actual_mgdl,
                          const Vec& predicted_mgdl, const std::string& title);

}  // namespace glucast::report
