#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lambdasurf/analysis.hpp"
#include "lambdasurf/model.hpp"
#include "lambdasurf/shooting.hpp"

namespace lambdasurf {

// Default seed for ambient sphere sampling; fixed so repeated runs are byte-identical.
inline constexpr std::uint64_t kAmbientSeedDefault = 12345;

// Shortest exact decimal form would suffice, but a fixed 17-significant-digit
// rendering keeps every writer bit-stable across libc versions.
std::string fmt17(double v);

// CSV with header t,x,y,theta,r,s,phi,theta_dot; one row per sample.
std::string samples_csv(const std::vector<TrajectorySample>& samples);

// CSV with header R,outcome,phi_end,s_max,T; failed rows carry outcome Error.
std::string sweep_csv(const std::vector<SweepRow>& rows);

// JSON object {params,r_star,bracket,iterations,closure_gap,perp_residual,
// max_eq_residual,n_samples}, two-space indent, trailing newline.
std::string curve_json_text(const ClosedCurve& curve, const Params& p);

// JSON array of check reports with their violations.
std::string report_json_text(const std::vector<LemmaReport>& reports);

// CSV with header id,cases,passed,skipped,violations,note.
std::string report_csv(const std::vector<LemmaReport>& reports);

// Fixed-width text table, one line per check.
std::string report_table(const std::vector<LemmaReport>& reports);

// Reads a curve/trajectory CSV back as profile points; needs x and y columns
// (theta is taken along when present). Throws std::runtime_error on a missing
// file or a header without those columns.
std::vector<ProfileState> read_curve_csv(const std::string& path);

// CSV with header x,y: the input points followed by their mirror across the
// diagonal in reverse order, so a generating arc comes back as a closed polygon.
std::string plot_csv(const std::vector<ProfileState>& pts);

// CSV with header u1..um,v1..vn: for each input point, samples_per_point random
// points of the product of spheres with radii (x, y), seeded for reproducibility.
std::string ambient_csv(const std::vector<ProfileState>& pts, const Params& p,
                        int samples_per_point, std::uint64_t seed);

// Writes content verbatim; throws std::runtime_error when the path cannot be opened.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace lambdasurf
