#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rtrg/flow.hpp"
#include "rtrg/phase.hpp"
#include "rtrg/spectral.hpp"
#include "rtrg/time_domain.hpp"

namespace rtrg {

std::string sha256_hex(const std::string& bytes);
std::string read_file(const std::string& path);

// writes into one directory and remembers each file's checksum, in write order
class ArtifactWriter {
public:
    explicit ArtifactWriter(std::string dir);
    void write(const std::string& name, const std::string& content);
    const std::vector<std::pair<std::string, std::string>>& artifacts() const { return files_; }
    const std::string& dir() const { return dir_; }

private:
    std::string dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

std::string fmt_num(double v);

struct FlowPoint {
    cplx E;
    Rates rates;
    bool ok = true; // false: the flow hit a singularity before reaching E
};

std::string flow_csv(const std::vector<FlowPoint>& pts);
std::string flow_json(const std::vector<FlowPoint>& pts);

std::string map_csv(const ResidualMap& m);
// gnuplot "nonuniform matrix" layout; flagged points are written as NaN
std::string map_matrix(const ResidualMap& m);
std::string map_gnuplot(const std::string& matrix_name);
std::string map_json(const ResidualMap& m);

std::string trace_csv(const RelaxationTrace& tr, const std::string& classification);
std::string trace_json(const RelaxationTrace& tr, const TraceClassification& c);
std::string trace_gnuplot(const std::string& csv_name);

std::string features_json(const SpectralFeatures& f, const ModelParams& p);
std::string features_csv(const SpectralFeatures& f);

std::string phase_json(const std::vector<PhaseRow>& rows);

} // namespace rtrg
