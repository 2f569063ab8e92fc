#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "opsize/exact_oracle.hpp"

namespace opsize {

enum class GateKind { H, X, Y, Z, CNOT, RX, RZ, RZZ };

/// Which protocol stage a gate belongs to; noise scoping keys off this.
enum class Segment { Prep, Trotter, Insertion, Decode, Other };

inline bool is_rotation(GateKind k) {
    return k == GateKind::RX || k == GateKind::RZ || k == GateKind::RZZ;
}
inline bool is_two_qubit(GateKind k) { return k == GateKind::CNOT || k == GateKind::RZZ; }

inline const char* gate_name(GateKind k) {
    switch (k) {
        case GateKind::H: return "H";
        case GateKind::X: return "X";
        case GateKind::Y: return "Y";
        case GateKind::Z: return "Z";
        case GateKind::CNOT: return "CNOT";
        case GateKind::RX: return "RX";
        case GateKind::RZ: return "RZ";
        case GateKind::RZZ: return "RZZ";
    }
    return "?";
}

struct Gate {
    GateKind kind;
    int q0;
    int q1 = -1;        // second qubit for CNOT/RZZ (CNOT: q0 control, q1 target)
    double angle = 0;   // rotation kinds only
    Segment seg = Segment::Other;
};

struct Circuit {
    int num_qubits = 0;
    std::vector<Gate> gates;

    void push(Gate g) {
        if (g.q0 < 0 || g.q0 >= num_qubits ||
            (is_two_qubit(g.kind) && (g.q1 < 0 || g.q1 >= num_qubits || g.q1 == g.q0)) ||
            (!is_two_qubit(g.kind) && g.q1 != -1))
            throw std::invalid_argument("Circuit: gate qubits out of range");
        if (is_rotation(g.kind) && !std::isfinite(g.angle))
            throw std::invalid_argument("Circuit: non-finite angle");
        gates.push_back(g);
    }

    void append(const Circuit& other) {
        if (other.num_qubits > num_qubits)
            throw std::invalid_argument("Circuit: append exceeds qubit count");
        for (const auto& g : other.gates) gates.push_back(g);
    }
};

/// Reverse gate order, negate rotation angles. H/X/Y/Z/CNOT are
/// self-inverse up to global phase.
inline Circuit adjoint(const Circuit& c) {
    Circuit out;
    out.num_qubits = c.num_qubits;
    out.gates.reserve(c.gates.size());
    for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it) {
        Gate g = *it;
        if (is_rotation(g.kind)) g.angle = -g.angle;
        out.gates.push_back(g);
    }
    return out;
}

/// Step 1: H on qubit n then CNOT(n, n+N) for each pair, mapping
/// |0...0> to a product of B^0 Bell pairs. System qubit n pairs with
/// ancilla n+N.
inline Circuit bell_prep(int n_sites) {
    if (n_sites < 1) throw std::invalid_argument("bell_prep: N >= 1 required");
    Circuit c;
    c.num_qubits = 2 * n_sites;
    for (int n = 0; n < n_sites; ++n) {
        c.push({GateKind::H, n, -1, 0, Segment::Prep});
        c.push({GateKind::CNOT, n, n + n_sites, 0, Segment::Prep});
    }
    return c;
}

/// Step 3 inverse map: CNOT(n, n+N) then H on n, sending the Bell basis
/// to computational bits (z_n, x_n) = (qubit n, qubit n+N). Decode
/// table: (0,0)->I, (0,1)->X, (1,1)->Y, (1,0)->Z.
inline Circuit bell_decode(int n_sites) {
    if (n_sites < 1) throw std::invalid_argument("bell_decode: N >= 1 required");
    Circuit c;
    c.num_qubits = 2 * n_sites;
    for (int n = 0; n < n_sites; ++n) {
        c.push({GateKind::CNOT, n, n + n_sites, 0, Segment::Decode});
        c.push({GateKind::H, n, -1, 0, Segment::Decode});
    }
    return c;
}

/// Pair-bit -> Pauli symbol per the decode table above.
inline int decode_symbol(bool z_bit, bool x_bit) {
    if (!z_bit && !x_bit) return 0;
    if (!z_bit && x_bit) return 1;
    if (z_bit && x_bit) return 2;
    return 3;
}

struct EvolutionSpec {
    ModelParams params;
    double t = 0;
    int r = 1;              // Trotter steps
    int insert_site = 1;    // 1-based
    int insert_pauli = 1;   // 1=X, 2=Y, 3=Z
};

/// One first-order split step, matrix exp(-i Hz dt) * exp(-i Hx dt)
/// (transverse field applied to the state first), on the system block
/// 0..N-1 of a 2N-qubit circuit. Conventions:
/// RX(a)=exp(-i a X/2), RZ(a)=exp(-i a Z/2), RZZ(a)=exp(-i a ZZ/2).
inline Circuit trotter_step(const ModelParams& params, double dt) {
    if (!std::isfinite(dt)) throw std::invalid_argument("trotter_step: non-finite dt");
    int N = params.N;
    Circuit c;
    c.num_qubits = 2 * N;
    for (int n = 0; n < N; ++n)
        c.push({GateKind::RX, n, -1, 2.0 * params.hx * dt, Segment::Trotter});
    for (int n = 0; n < N; ++n)
        c.push({GateKind::RZ, n, -1, 2.0 * params.hz * dt, Segment::Trotter});
    for (int n = 0; n + 1 < N; ++n)
        c.push({GateKind::RZZ, n, n + 1, 2.0 * params.J * dt, Segment::Trotter});
    return c;
}

/// Step 2: Trotterized e^{-iHt}, Pauli insertion at the seed site, then
/// the structural adjoint of the forward block. With the insertion
/// removed the circuit is the exact identity for every r.
inline Circuit heisenberg_sandwich(const EvolutionSpec& spec) {
    if (spec.r < 1) throw std::invalid_argument("heisenberg_sandwich: r >= 1 required");
    if (spec.t < 0) throw std::invalid_argument("heisenberg_sandwich: t >= 0 required");
    if (spec.insert_site < 1 || spec.insert_site > spec.params.N)
        throw std::invalid_argument("heisenberg_sandwich: insert_site out of range");
    if (spec.insert_pauli < 1 || spec.insert_pauli > 3)
        throw std::invalid_argument("heisenberg_sandwich: insert_pauli must be X/Y/Z");

    double dt = spec.t / static_cast<double>(spec.r);
    Circuit step = trotter_step(spec.params, dt);
    Circuit forward;
    forward.num_qubits = 2 * spec.params.N;
    for (int s = 0; s < spec.r; ++s) forward.append(step);

    Circuit c = forward;
    GateKind insertion = spec.insert_pauli == 1   ? GateKind::X
                         : spec.insert_pauli == 2 ? GateKind::Y
                                                  : GateKind::Z;
    c.push({insertion, spec.insert_site - 1, -1, 0, Segment::Insertion});
    c.append(adjoint(forward));
    return c;
}

/// Full protocol circuit: prep, sandwich, optional decode.
inline Circuit protocol_circuit(const EvolutionSpec& spec, bool include_decode) {
    Circuit c = bell_prep(spec.params.N);
    c.append(heisenberg_sandwich(spec));
    if (include_decode) c.append(bell_decode(spec.params.N));
    return c;
}

/// Line-oriented text format: `KIND q0 [q1] [angle]` per gate.
inline std::string to_text(const Circuit& c) {
    std::ostringstream os;
    os << "qubits " << c.num_qubits << "\n";
    char buf[64];
    for (const auto& g : c.gates) {
        os << gate_name(g.kind) << ' ' << g.q0;
        if (is_two_qubit(g.kind)) os << ' ' << g.q1;
        if (is_rotation(g.kind)) {
            std::snprintf(buf, sizeof buf, " %.17g", g.angle);
            os << buf;
        }
        os << "\n";
    }
    return os.str();
}

inline Circuit from_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    Circuit c;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (!have_header) {
            if (tok != "qubits") throw std::invalid_argument("from_text: missing qubits header");
            ls >> c.num_qubits;
            have_header = true;
            continue;
        }
        Gate g{};
        if (tok == "H") g.kind = GateKind::H;
        else if (tok == "X") g.kind = GateKind::X;
        else if (tok == "Y") g.kind = GateKind::Y;
        else if (tok == "Z") g.kind = GateKind::Z;
        else if (tok == "CNOT") g.kind = GateKind::CNOT;
        else if (tok == "RX") g.kind = GateKind::RX;
        else if (tok == "RZ") g.kind = GateKind::RZ;
        else if (tok == "RZZ") g.kind = GateKind::RZZ;
        else throw std::invalid_argument("from_text: unknown gate '" + tok + "'");
        ls >> g.q0;
        if (is_two_qubit(g.kind)) ls >> g.q1;
        if (is_rotation(g.kind)) ls >> g.angle;
        if (ls.fail()) throw std::invalid_argument("from_text: malformed line '" + line + "'");
        c.push(g);
    }
    if (!have_header) throw std::invalid_argument("from_text: empty circuit text");
    return c;
}

}  // namespace opsize
