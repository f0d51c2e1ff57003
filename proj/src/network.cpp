#include "mpt/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mpt {

bool SignalSchedule::is_green(const std::string& arc_id, double t) const {
    auto it = green.find(arc_id);
    if (it == green.end()) return true;
    if (period <= 0.0) return true;
    double phase = std::fmod(t - offset, period);
    if (phase < 0.0) phase += period;
    for (const auto& [a, b] : it->second)
        if (phase >= a && phase < b) return true;
    return false;
}

double BoundaryCondition::eval(double t) const {
    switch (kind) {
        case Kind::Constant:
            return value;
        case Kind::ZeroFlux:
            return 0.0; // unused; flux is forced to zero directly
        case Kind::Table: {
            if (times.empty()) return 0.0;
            if (t <= times.front()) return values.front();
            if (t >= times.back()) return values.back();
            auto it = std::upper_bound(times.begin(), times.end(), t);
            std::size_t hi = it - times.begin();
            std::size_t lo = hi - 1;
            double w = (t - times[lo]) / (times[hi] - times[lo]);
            return (1.0 - w) * values[lo] + w * values[hi];
        }
    }
    return 0.0;
}

BoundaryCondition BoundaryCondition::constant(double v) {
    BoundaryCondition bc;
    bc.kind = Kind::Constant;
    bc.value = v;
    return bc;
}

BoundaryCondition BoundaryCondition::table(std::vector<double> t, std::vector<double> v) {
    if (t.size() != v.size() || t.size() < 2)
        throw std::invalid_argument("BoundaryCondition::table: need >= 2 matching samples");
    BoundaryCondition bc;
    bc.kind = Kind::Table;
    bc.times = std::move(t);
    bc.values = std::move(v);
    return bc;
}

BoundaryCondition BoundaryCondition::closed() { return BoundaryCondition{}; }

int GridSpec::step_count() const {
    double raw = t_f / dt;
    double rounded = std::round(raw);
    if (std::abs(raw - rounded) > 1e-9 * std::max(1.0, raw))
        throw std::invalid_argument("GridSpec: t_f is not an integer multiple of dt");
    return static_cast<int>(rounded);
}

namespace {

template <typename T>
int find_id(const std::vector<T>& v, const std::string& id) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i].id == id) return static_cast<int>(i);
    return -1;
}

} // namespace

int NetworkSpec::arc_index(const std::string& id) const { return find_id(arcs, id); }
int NetworkSpec::path_index(const std::string& id) const { return find_id(paths, id); }
int NetworkSpec::junction_index(const std::string& id) const {
    return find_id(junctions, id);
}

std::vector<Diagnostic> validate(const NetworkSpec& net, const GridSpec& grid) {
    std::vector<Diagnostic> out;
    auto fail = [&out](const std::string& where, const std::string& what) {
        out.push_back({where, what});
    };

    if (!net.diagram) fail("network", "no fundamental diagram configured");
    if (!(grid.dx > 0.0)) fail("grid", "dx must be positive");
    if (!(grid.dt > 0.0)) fail("grid", "dt must be positive");
    if (!(grid.t_f > 0.0)) fail("grid", "t_f must be positive");

    std::set<std::string> arc_ids;
    for (const auto& a : net.arcs) {
        const std::string where = "arc " + a.id;
        if (!arc_ids.insert(a.id).second) fail(where, "duplicate arc id");
        if (!(a.length > 0.0)) fail(where, "length must be positive");
        if (a.cell_count < 3)
            fail(where, "cell_count must be >= 3 (one interior cell plus both "
                        "junction-adjacent cells)");
        if (a.cell_count > 0 && grid.dx > 0.0 &&
            std::abs(a.length / a.cell_count - grid.dx) > 1e-12 * grid.dx) {
            std::ostringstream os;
            os << "length/cell_count = " << a.length / a.cell_count
               << " does not match grid dx = " << grid.dx;
            fail(where, os.str());
        }
    }

    // arc id -> (junction feeding it, junction draining it); used for boundary
    // placement and path endpoint checks.
    std::map<std::string, std::string> fed_by, drained_by;

    std::set<std::string> junction_ids;
    for (const auto& j : net.junctions) {
        const std::string where = "junction " + j.id;
        if (!junction_ids.insert(j.id).second) fail(where, "duplicate junction id");
        const auto n = static_cast<Eigen::Index>(j.incoming.size());
        const auto m = static_cast<Eigen::Index>(j.outgoing.size());
        if (n == 0 || m == 0) fail(where, "needs at least one incoming and one outgoing arc");
        if (n > 3 || m > 3)
            fail(where, "junctions with more than 3 incoming or outgoing arcs are not supported");

        for (const auto& id : j.incoming) {
            if (net.arc_index(id) < 0) fail(where, "unknown incoming arc '" + id + "'");
            if (!drained_by.emplace(id, j.id).second)
                fail(where, "arc '" + id + "' is incoming at more than one junction");
        }
        for (const auto& id : j.outgoing) {
            if (net.arc_index(id) < 0) fail(where, "unknown outgoing arc '" + id + "'");
            if (!fed_by.emplace(id, j.id).second)
                fail(where, "arc '" + id + "' is outgoing at more than one junction");
        }
        for (const auto& id : j.incoming)
            if (std::find(j.outgoing.begin(), j.outgoing.end(), id) != j.outgoing.end())
                fail(where, "arc '" + id + "' appears both incoming and outgoing");

        if (j.preferences.rows() != m || j.preferences.cols() != n) {
            std::ostringstream os;
            os << "preference matrix is " << j.preferences.rows() << "x"
               << j.preferences.cols() << ", expected " << m << "x" << n;
            fail(where, os.str());
        } else {
            for (Eigen::Index c = 0; c < n; ++c) {
                double s = j.preferences.col(c).sum();
                if ((j.preferences.col(c).array() < -1e-12).any() ||
                    (j.preferences.col(c).array() > 1.0 + 1e-12).any())
                    fail(where, "preference column " + std::to_string(c + 1) +
                                " has entries outside [0,1]");
                if (std::abs(s - 1.0) > 1e-12) {
                    std::ostringstream os;
                    os << "preference column " << (c + 1) << " sums to " << s;
                    fail(where, os.str());
                }
            }
        }

        if (n >= 2) {
            if (j.priorities.size() != n) {
                fail(where, "priorities q missing or wrong length (" +
                            std::to_string(j.priorities.size()) + " given, " +
                            std::to_string(n) + " needed)");
            } else if ((j.priorities.array() < -1e-12).any() ||
                       std::abs(j.priorities.sum() - 1.0) > 1e-12) {
                fail(where, "priorities q must be nonnegative and sum to 1");
            }
        }

        if (j.signal) {
            if (!(j.signal->period > 0.0)) fail(where, "signal period must be positive");
            for (const auto& [arc, wins] : j.signal->green) {
                if (std::find(j.incoming.begin(), j.incoming.end(), arc) ==
                    j.incoming.end())
                    fail(where, "signal window for '" + arc + "' which is not incoming here");
                for (const auto& [a, b] : wins)
                    if (!(a >= 0.0 && b <= j.signal->period && a < b))
                        fail(where, "signal window for '" + arc + "' outside [0, period)");
            }
        }
    }

    std::set<std::string> path_ids;
    for (const auto& p : net.paths) {
        const std::string where = "path " + p.id;
        if (!path_ids.insert(p.id).second) fail(where, "duplicate path id");
        if (p.arcs.empty()) {
            fail(where, "path has no arcs");
            continue;
        }
        std::set<std::string> seen;
        bool refs_ok = true;
        for (const auto& id : p.arcs) {
            if (net.arc_index(id) < 0) {
                fail(where, "unknown arc '" + id + "'");
                refs_ok = false;
            }
            if (!seen.insert(id).second) fail(where, "arc '" + id + "' repeats");
        }
        if (!refs_ok) continue;
        for (std::size_t k = 0; k + 1 < p.arcs.size(); ++k) {
            // Consecutive arcs must be (incoming, outgoing) at one junction.
            auto d = drained_by.find(p.arcs[k]);
            auto f = fed_by.find(p.arcs[k + 1]);
            if (d == drained_by.end() || f == fed_by.end() || d->second != f->second) {
                std::ostringstream os;
                os << "arcs '" << p.arcs[k] << "' -> '" << p.arcs[k + 1]
                   << "' are not (incoming, outgoing) at a common junction";
                fail(where, os.str());
            }
        }
        // A path must span source to sink: its first arc cannot be fed by a
        // junction and its last cannot drain into one, otherwise the ghost
        // boundary data would collide with junction coupling.
        if (fed_by.count(p.arcs.front()))
            fail(where, "first arc '" + p.arcs.front() + "' is fed by junction " +
                        fed_by[p.arcs.front()] + "; paths must start at a free end");
        if (drained_by.count(p.arcs.back()))
            fail(where, "last arc '" + p.arcs.back() + "' drains into junction " +
                        drained_by[p.arcs.back()] + "; paths must end at a free end");
    }

    for (const auto& [key, bc] : net.boundaries) {
        std::string where;
        bool start = key.end == BoundaryKey::End::Start;
        if (key.target == BoundaryKey::Target::Arc) {
            where = "boundary arc " + key.id + (start ? " start" : " end");
            if (net.arc_index(key.id) < 0) {
                fail(where, "unknown arc");
                continue;
            }
            if (start && fed_by.count(key.id))
                fail(where, "arc start is attached to junction " + fed_by[key.id]);
            if (!start && drained_by.count(key.id))
                fail(where, "arc end is attached to junction " + drained_by[key.id]);
            // A total-density value cannot be split between several paths
            // sharing the end, so the per-path solver would have no ghost data.
            int sharers = 0;
            for (const auto& p : net.paths) {
                if (p.arcs.empty()) continue;
                if ((start ? p.arcs.front() : p.arcs.back()) == key.id) ++sharers;
            }
            if (sharers > 1)
                fail(where, "arc-level condition is ambiguous: " +
                                std::to_string(sharers) +
                                " paths share this end; state it per path");
        } else {
            where = "boundary path " + key.id + (start ? " start" : " end");
            if (net.path_index(key.id) < 0) {
                fail(where, "unknown path");
                continue;
            }
        }
        double rmax = net.diagram ? net.diagram->rho_max() : 1.0;
        auto check_value = [&](double v) {
            if (v < 0.0 || v > rmax + 1e-12)
                fail(where, "density value " + std::to_string(v) + " outside [0, rho_max]");
        };
        if (bc.kind == BoundaryCondition::Kind::Constant) check_value(bc.value);
        if (bc.kind == BoundaryCondition::Kind::Table) {
            for (double v : bc.values) check_value(v);
            if (bc.times.size() != bc.values.size() || bc.times.size() < 2)
                fail(where, "time table needs matching t/v samples (>= 2)");
            else {
                for (std::size_t i = 1; i < bc.times.size(); ++i)
                    if (!(bc.times[i] > bc.times[i - 1]))
                        fail(where, "time table abscissae not increasing");
                if (bc.times.front() > 0.0 || bc.times.back() < grid.t_f - 1e-12)
                    fail(where, "time table does not cover [0, t_f]");
            }
        }
    }

    return out;
}

} // namespace mpt
