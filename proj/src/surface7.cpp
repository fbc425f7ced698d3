#include "s7sim/surface7.hpp"

#include <cmath>
#include <stdexcept>

namespace s7sim::surface7 {

namespace {

std::vector<cplx> string_matrix_16(const std::string& tokens) {
    // dense 16x16 matrix of a product operator over four qubits
    std::vector<cplx> out(256, cplx(0.0, 0.0));
    for (int col = 0; col < 16; ++col) {
        int row = col;
        cplx val(1.0, 0.0);
        bool zero = false;
        for (int s = 0; s < 4 && !zero; ++s) {
            const int bit = (col >> (3 - s)) & 1;
            switch (tokens[s]) {
                case 'I':
                    break;
                case 'Z':
                    val *= (bit == 0) ? 1.0 : -1.0;
                    break;
                case 'X':
                    row ^= 1 << (3 - s);
                    break;
                case 'Y':
                    row ^= 1 << (3 - s);
                    val *= (bit == 0) ? cplx(0.0, 1.0) : cplx(0.0, -1.0);
                    break;
                default:
                    zero = true;
                    break;
            }
        }
        if (!zero) out[row * 16 + col] += val;
    }
    return out;
}

}  // namespace

const std::array<std::string, 3>& stabilizers() {
    static const std::array<std::string, 3> s = {"ZIZI", "XXXX", "IZIZ"};
    return s;
}

const std::array<std::string, 4>& logical_z_reps() {
    static const std::array<std::string, 4> s = {"ZZII", "IIZZ", "ZIIZ", "IZZI"};
    return s;
}

const std::array<std::string, 2>& logical_x_reps() {
    static const std::array<std::string, 2> s = {"XIXI", "IXIX"};
    return s;
}

const std::string& logical_y_rep() {
    static const std::string s = "YZXI";
    return s;
}

std::pair<std::vector<cplx>, std::vector<cplx>> logical_basis() {
    const double r = 1.0 / std::sqrt(2.0);
    std::vector<cplx> zero(16, cplx(0.0, 0.0)), one(16, cplx(0.0, 0.0));
    zero[0b0000] = r;
    zero[0b1111] = r;
    one[0b0101] = r;
    one[0b1010] = r;
    return {zero, one};
}

const std::vector<cplx>& codespace_projector() {
    static const std::vector<cplx> proj = [] {
        std::vector<cplx> p(256, cplx(0.0, 0.0));
        for (int i = 0; i < 16; ++i) p[i * 16 + i] = 1.0;
        for (const auto& s : stabilizers()) {
            const auto m = string_matrix_16(s);
            std::vector<cplx> next(256, cplx(0.0, 0.0));
            for (int i = 0; i < 16; ++i)
                for (int j = 0; j < 16; ++j) {
                    cplx acc(0.0, 0.0);
                    for (int k = 0; k < 16; ++k) {
                        const cplx half = 0.5 * (cplx(i == k ? 1.0 : 0.0, 0.0) + m[i * 16 + k]);
                        acc += half * p[k * 16 + j];
                    }
                    next[i * 16 + j] = acc;
                }
            p = std::move(next);
        }
        return p;
    }();
    return proj;
}

std::array<std::array<cplx, 2>, 2> LogicalState::matrix() const {
    std::array<std::array<cplx, 2>, 2> m;
    m[0][0] = 0.5 * (1.0 + z);
    m[1][1] = 0.5 * (1.0 - z);
    m[0][1] = 0.5 * cplx(x, -y);
    m[1][0] = 0.5 * cplx(x, y);
    return m;
}

double LogicalState::bloch_norm() const { return std::sqrt(x * x + y * y + z * z); }

namespace {
double projected_expectation(const DensityMatrix& rho, const std::string& rep) {
    // Tr(rho O I_L) with O the representative string; multiplying by the
    // projector makes every representative of the same logical equivalent.
    const auto& proj = codespace_projector();
    const auto op = string_matrix_16(rep);
    std::vector<cplx> oproj(256, cplx(0.0, 0.0));
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) {
            cplx acc(0.0, 0.0);
            for (int k = 0; k < 16; ++k) acc += op[i * 16 + k] * proj[k * 16 + j];
            oproj[i * 16 + j] = acc;
        }
    cplx acc(0.0, 0.0);
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) acc += rho.at(i, j) * oproj[j * 16 + i];
    return acc.real();
}
}  // namespace

LogicalState project_to_codespace(const DensityMatrix& rho) {
    if (rho.dim() != 16) throw std::invalid_argument("codespace projection needs a 4-qubit state");
    const double weight = projected_expectation(rho, "IIII");
    if (weight <= 1e-12)
        throw std::runtime_error("negligible codespace weight; projection is meaningless");
    LogicalState out;
    out.weight = weight;
    out.x = projected_expectation(rho, logical_x_reps()[0]) / weight;
    out.y = projected_expectation(rho, logical_y_rep()) / weight;
    out.z = projected_expectation(rho, logical_z_reps()[0]) / weight;
    return out;
}

double logical_fidelity(const LogicalState& rho, double tx, double ty, double tz) {
    const double n = std::sqrt(tx * tx + ty * ty + tz * tz);
    if (std::abs(n - 1.0) > 1e-9) throw std::invalid_argument("target must be a pure state");
    return 0.5 * (1.0 + rho.x * tx + rho.y * ty + rho.z * tz);
}

std::vector<cplx> logical_vector(cplx c0, cplx c1) {
    auto [zero, one] = logical_basis();
    const double norm = std::sqrt(std::norm(c0) + std::norm(c1));
    std::vector<cplx> out(16, cplx(0.0, 0.0));
    for (int i = 0; i < 16; ++i) out[i] = (c0 * zero[i] + c1 * one[i]) / norm;
    return out;
}

const std::vector<Cardinal>& cardinal_states() {
    static const std::vector<Cardinal> c = {
        {"0L", 0.0, 0.0, 1.0},  {"1L", 0.0, 0.0, -1.0}, {"+L", 1.0, 0.0, 0.0},
        {"-L", -1.0, 0.0, 0.0}, {"+iL", 0.0, 1.0, 0.0}, {"-iL", 0.0, -1.0, 0.0},
    };
    return c;
}

std::vector<cplx> projected_prep_state(double theta, double phi) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    return logical_vector(c * c, s * s * std::exp(cplx(0.0, phi)));
}

double projected_prep_probability(double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    const double c4 = c * c * c * c, s4 = s * s * s * s;
    return 0.5 * (c4 + s4);
}

}  // namespace s7sim::surface7
