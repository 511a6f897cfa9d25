#include "sgflow/io.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sgflow {

namespace {

using nlohmann::json;

std::array<std::uint32_t, 256> make_crc_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k)
            c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
        table[i] = c;
    }
    return table;
}

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double read_double(const std::string& token, const std::string& what) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw IoError("malformed " + what + ": '" + token + "'");
    return out;
}

long read_long(const std::string& token, const std::string& what) {
    long out = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw IoError("malformed " + what + ": '" + token + "'");
    return out;
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_records(const std::vector<json>& records, const std::string& path) {
    std::string bytes;
    for (const json& r : records) {
        bytes += r.dump();
        bytes += '\n';
    }
    write_file(path, bytes);
}

} // namespace

std::uint32_t crc32(const std::string& bytes) {
    static const std::array<std::uint32_t, 256> table = make_crc_table();
    std::uint32_t c = 0xFFFFFFFFu;
    for (unsigned char b : bytes)
        c = table[(c ^ b) & 0xFFu] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

void write_trajectory(const Trajectory& traj, const std::string& path) {
    if (traj.snapshots.empty()) throw IoError("refusing to write an empty trajectory");
    const Eigen::Index atoms = traj.snapshots.front().measure.size();
    for (const Snapshot& s : traj.snapshots)
        if (s.measure.size() != atoms || s.measure.dim() != traj.dimension)
            throw IoError("snapshots disagree on atom count or dimension");

    std::string payload;
    payload += "SGT1 " + std::to_string(traj.dimension) + " " +
               std::to_string(traj.snapshots.size()) + " " + std::to_string(atoms) + "\n";
    for (const Snapshot& s : traj.snapshots) {
        payload += "t " + fmt17(s.time) + "\n";
        for (Eigen::Index i = 0; i < atoms; ++i) {
            for (Eigen::Index k = 0; k < s.measure.dim(); ++k) {
                payload += fmt17(s.measure.points()(i, k));
                payload += ' ';
            }
            payload += fmt17(s.measure.weights()[i]);
            payload += '\n';
        }
        payload += "diag " + fmt17(s.diag.ot_value) + " " +
                   fmt17(s.diag.potential_energy) + " " +
                   fmt17(s.diag.support_radius) + " " +
                   std::to_string(s.diag.sinkhorn_iterations) + "\n";
    }
    char crc[16];
    std::snprintf(crc, sizeof(crc), "%08x", crc32(payload));
    payload += std::string("crc32 ") + crc + "\n";
    write_file(path, payload);
}

Trajectory read_trajectory(const std::string& path) {
    const std::string bytes = read_file(path);

    // Split into lines, remembering byte offsets for the checksum.
    std::vector<std::string> lines;
    std::vector<std::size_t> offsets;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        const std::size_t nl = bytes.find('\n', pos);
        const std::size_t end = nl == std::string::npos ? bytes.size() : nl;
        offsets.push_back(pos);
        lines.push_back(bytes.substr(pos, end - pos));
        pos = nl == std::string::npos ? bytes.size() : nl + 1;
    }
    if (lines.empty()) throw ChecksumMismatch("empty trajectory file: " + path);

    if (lines.back().rfind("crc32 ", 0) != 0)
        throw ChecksumMismatch("missing checksum line (truncated file?): " + path);
    const std::string stated = lines.back().substr(6);
    char expect[16];
    std::snprintf(expect, sizeof(expect), "%08x",
                  crc32(bytes.substr(0, offsets.back())));
    if (stated != expect)
        throw ChecksumMismatch("checksum " + stated + " does not match " + expect);
    lines.pop_back();

    if (lines.empty()) throw IoError("no header line: " + path);
    std::stringstream header(lines.front());
    std::string magic;
    long d = 0, snaps = 0, atoms = 0;
    header >> magic >> d >> snaps >> atoms;
    if (magic != "SGT1") {
        if (magic.rfind("SGT", 0) == 0)
            throw FormatVersionMismatch("unsupported trajectory format " + magic);
        throw IoError("not a trajectory file: " + path);
    }
    if (header.fail() || d < 1 || snaps < 1 || atoms < 1)
        throw IoError("malformed header: '" + lines.front() + "'");

    Trajectory traj;
    traj.dimension = static_cast<int>(d);
    std::size_t cursor = 1;
    const auto next_line = [&]() -> const std::string& {
        if (cursor >= lines.size()) throw IoError("unexpected end of file: " + path);
        return lines[cursor++];
    };
    const auto split = [](const std::string& line) {
        std::vector<std::string> tokens;
        std::stringstream ss(line);
        std::string tok;
        while (ss >> tok) tokens.push_back(tok);
        return tokens;
    };

    for (long s = 0; s < snaps; ++s) {
        const auto time_tokens = split(next_line());
        if (time_tokens.size() != 2 || time_tokens[0] != "t")
            throw IoError("expected a time line in snapshot " + std::to_string(s));
        const double time = read_double(time_tokens[1], "time");

        Eigen::MatrixXd points(atoms, d);
        Eigen::VectorXd weights(atoms);
        for (long i = 0; i < atoms; ++i) {
            const auto tokens = split(next_line());
            if (tokens.size() != static_cast<std::size_t>(d + 1))
                throw IoError("atom line has " + std::to_string(tokens.size()) +
                              " fields, expected " + std::to_string(d + 1));
            for (long k = 0; k < d; ++k)
                points(i, k) = read_double(tokens[static_cast<std::size_t>(k)], "coordinate");
            weights[i] = read_double(tokens.back(), "weight");
        }

        const auto diag_tokens = split(next_line());
        if (diag_tokens.size() != 5 || diag_tokens[0] != "diag")
            throw IoError("expected a diag line in snapshot " + std::to_string(s));
        StepDiagnostics diag;
        diag.ot_value = read_double(diag_tokens[1], "ot value");
        diag.potential_energy = read_double(diag_tokens[2], "potential energy");
        diag.support_radius = read_double(diag_tokens[3], "support radius");
        diag.sinkhorn_iterations = read_long(diag_tokens[4], "iteration count");

        traj.snapshots.push_back(
            Snapshot{time, DiscreteMeasure(std::move(points), std::move(weights)), diag});
    }
    if (cursor != lines.size())
        throw IoError("trailing content after the last snapshot: " + path);
    return traj;
}

void write_rate_report(const RateFit& fit, const std::string& study,
                       const std::string& path) {
    std::vector<json> records;
    for (std::size_t i = 0; i < fit.grid.size(); ++i)
        records.push_back(json{{"study", study},
                               {"record", "point"},
                               {"x", fit.grid[i]},
                               {"error", fit.errors[i]}});
    records.push_back(json{{"study", study},
                           {"record", "summary"},
                           {"slope", fit.slope},
                           {"half_width", fit.half_width},
                           {"degenerate", fit.degenerate}});
    write_records(records, path);
}

void write_eps_report(const EpsGapReport& report, const std::string& path) {
    std::vector<json> records;
    for (std::size_t i = 0; i < report.grid.size(); ++i)
        records.push_back(json{{"study", "eps"},
                               {"record", "point"},
                               {"epsilon", report.grid[i]},
                               {"plan_cost_gap", report.plan_cost_gap[i]},
                               {"value_gap", report.value_gap[i]}});
    records.push_back(json{{"study", "eps"},
                           {"record", "summary"},
                           {"w2_squared", report.w2_squared},
                           {"positive", report.positive},
                           {"strictly_decreasing", report.strictly_decreasing},
                           {"slope", report.fit.slope},
                           {"half_width", report.fit.half_width},
                           {"degenerate", report.fit.degenerate}});
    write_records(records, path);
}

void write_energy_report(const EnergyReport& report, const std::string& path) {
    std::vector<json> records;
    for (std::size_t i = 0; i < report.times.size(); ++i)
        records.push_back(json{{"study", "energy"},
                               {"record", "point"},
                               {"t", report.times[i]},
                               {"kinetic", report.kinetic[i]},
                               {"potential", report.potential[i]},
                               {"total", report.total[i]}});
    records.push_back(json{{"study", "energy"},
                           {"record", "summary"},
                           {"max_drift", report.max_drift}});
    write_records(records, path);
}

void write_joint_report(const JointReport& report, const std::string& path) {
    std::vector<json> records;
    for (std::size_t i = 0; i < report.schedule.size(); ++i) {
        json r{{"study", "joint"},
               {"record", "row"},
               {"index", i},
               {"epsilon", report.schedule[i].epsilon},
               {"tau", report.schedule[i].tau},
               {"count", report.schedule[i].count},
               {"seed", report.schedule[i].seed}};
        if (i + 1 < report.schedule.size()) {
            r["distance_to_next"] = report.distances[i];
            r["exact_metric"] = static_cast<bool>(report.exact_metric[i]);
            if (!report.exact_metric[i])
                r["note"] = "W2 approximated by the debiased entropic value at the "
                            "smallest scheduled epsilon";
        }
        records.push_back(std::move(r));
    }
    records.push_back(json{{"study", "joint"},
                           {"record", "summary"},
                           {"decreasing", report.decreasing},
                           {"debiased_fallback", report.debiased_fallback}});
    write_records(records, path);
}

std::string rate_table(const RateFit& fit, const std::string& study) {
    std::ostringstream out;
    out << study << " study\n";
    out << "  x            error\n";
    for (std::size_t i = 0; i < fit.grid.size(); ++i) {
        char line[80];
        std::snprintf(line, sizeof(line), "  %-12.6g %.6e\n", fit.grid[i], fit.errors[i]);
        out << line;
    }
    if (fit.degenerate)
        out << "  degenerate (all errors zero or fewer than two usable points)\n";
    else
        out << "  fitted slope " << fit.slope << " +/- " << fit.half_width << "\n";
    return out.str();
}

std::string eps_table(const EpsGapReport& report) {
    std::ostringstream out;
    out << "eps-gap study (W2^2 = " << report.w2_squared << ")\n";
    out << "  epsilon      plan-cost gap   value gap\n";
    for (std::size_t i = 0; i < report.grid.size(); ++i) {
        char line[100];
        std::snprintf(line, sizeof(line), "  %-12.6g %-15.6e %.6e\n", report.grid[i],
                      report.plan_cost_gap[i], report.value_gap[i]);
        out << line;
    }
    out << "  positive: " << (report.positive ? "yes" : "no")
        << ", strictly decreasing: " << (report.strictly_decreasing ? "yes" : "no")
        << "\n";
    if (!report.fit.degenerate)
        out << "  value-gap slope vs eps|log eps|: " << report.fit.slope << " +/- "
            << report.fit.half_width << "\n";
    return out.str();
}

std::string energy_table(const EnergyReport& report) {
    std::ostringstream out;
    out << "energy report\n";
    out << "  t            kinetic        potential      total\n";
    for (std::size_t i = 0; i < report.times.size(); ++i) {
        char line[120];
        std::snprintf(line, sizeof(line), "  %-12.6g %-14.8g %-14.8g %.8g\n",
                      report.times[i], report.kinetic[i], report.potential[i],
                      report.total[i]);
        out << line;
    }
    out << "  max drift " << report.max_drift << "\n";
    return out.str();
}

std::string joint_table(const JointReport& report) {
    std::ostringstream out;
    out << "joint convergence study\n";
    out << "  epsilon      tau          count    seed     d(i, i+1)\n";
    for (std::size_t i = 0; i < report.schedule.size(); ++i) {
        char line[120];
        if (i + 1 < report.schedule.size())
            std::snprintf(line, sizeof(line), "  %-12.6g %-12.6g %-8d %-8llu %.6e%s\n",
                          report.schedule[i].epsilon, report.schedule[i].tau,
                          report.schedule[i].count,
                          static_cast<unsigned long long>(report.schedule[i].seed),
                          report.distances[i],
                          report.exact_metric[i] ? "" : " (debiased entropic)");
        else
            std::snprintf(line, sizeof(line), "  %-12.6g %-12.6g %-8d %-8llu\n",
                          report.schedule[i].epsilon, report.schedule[i].tau,
                          report.schedule[i].count,
                          static_cast<unsigned long long>(report.schedule[i].seed));
        out << line;
    }
    out << "  successive distances decreasing: " << (report.decreasing ? "yes" : "no")
        << "\n";
    return out.str();
}

std::vector<JointScheduleRow> load_schedule(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open schedule file: " + path);
    std::vector<JointScheduleRow> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::stringstream ss(line);
        std::string e, t, c, s;
        if (!(ss >> e)) continue; // blank line
        if (!(ss >> t >> c >> s))
            throw ParseError(lineno, "schedule rows need epsilon, tau, count, seed");
        std::string extra;
        if (ss >> extra) throw ParseError(lineno, "trailing content '" + extra + "'");
        JointScheduleRow row;
        row.epsilon = read_double(e, "schedule epsilon");
        row.tau = read_double(t, "schedule tau");
        row.count = static_cast<int>(read_long(c, "schedule count"));
        row.seed = static_cast<std::uint64_t>(read_long(s, "schedule seed"));
        rows.push_back(row);
    }
    if (rows.empty()) throw IoError("schedule file has no rows: " + path);
    return rows;
}

void write_manifest(const SimulationConfig& config, const TheoryBounds& bounds,
                    const std::map<std::string, double>& timings_ms,
                    const std::vector<std::string>& outputs, const std::string& path) {
    const auto measure_echo = [](const MeasureSpec& spec) {
        json m;
        if (!spec.source_file.empty()) {
            m["file"] = spec.source_file;
            m["atoms"] = spec.explicit_measure ? spec.explicit_measure->size() : 0;
        } else if (spec.ball) {
            m["ball_radius"] = spec.ball->radius;
            m["count"] = spec.count;
            m["seed"] = spec.seed;
        }
        return m;
    };
    std::vector<double> drift_entries;
    for (Eigen::Index r = 0; r < config.drift.A.rows(); ++r)
        for (Eigen::Index c = 0; c < config.drift.A.cols(); ++c)
            drift_entries.push_back(config.drift.A(r, c));

    json manifest{
        {"artifact_version", kArtifactVersion},
        {"config",
         {{"dimension", config.dimension},
          {"drift", drift_entries},
          {"drift_is_skew", config.drift.is_skew},
          {"epsilon", config.epsilon},
          {"tau", config.tau},
          {"horizon", config.horizon},
          {"alpha0", measure_echo(config.alpha0)},
          {"mu0", measure_echo(config.mu0)},
          {"sinkhorn.tol", config.sinkhorn_tol},
          {"sinkhorn.max_iter", config.sinkhorn_max_iter},
          {"warm_start", config.warm_start},
          {"snapshot_stride", config.snapshot_stride}}},
        {"theory_bounds",
         {{"r0", bounds.r0},
          {"drift_norm", bounds.drift_norm},
          {"growth_c", bounds.growth_c},
          {"r_t", bounds.r_t},
          {"r_paper", bounds.r_paper},
          {"k_bound", bounds.k_bound}}},
        {"timings_ms", timings_ms},
        {"outputs", outputs}};
    write_file(path, manifest.dump(2) + "\n");
}

} // namespace sgflow
