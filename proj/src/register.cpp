#include "s7sim/register.hpp"

namespace s7sim {

QuditRegister::QuditRegister(std::vector<int> dims, std::vector<std::string> labels)
    : dims_(std::move(dims)), labels_(std::move(labels)) {
    if (dims_.empty()) throw std::invalid_argument("register needs at least one site");
    for (int d : dims_)
        if (d != 2 && d != 3) throw std::invalid_argument("site dimension must be 2 or 3");
    if (labels_.empty()) {
        for (std::size_t i = 0; i < dims_.size(); ++i) labels_.push_back("q" + std::to_string(i));
    }
    if (labels_.size() != dims_.size())
        throw std::invalid_argument("label count does not match site count");
    strides_.assign(dims_.size(), 1);
    for (int k = static_cast<int>(dims_.size()) - 2; k >= 0; --k)
        strides_[k] = strides_[k + 1] * dims_[k + 1];
    total_dim_ = strides_[0] * dims_[0];
}

QuditRegister QuditRegister::qubits(int n, std::vector<std::string> labels) {
    return QuditRegister(std::vector<int>(n, 2), std::move(labels));
}

int QuditRegister::site_index(const std::string& label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
        if (labels_[i] == label) return static_cast<int>(i);
    throw std::invalid_argument("unknown site label: " + label);
}

std::size_t QuditRegister::basis_index(const std::vector<int>& occ) const {
    if (occ.size() != dims_.size())
        throw std::invalid_argument("occupation list does not match site count");
    std::size_t idx = 0;
    for (std::size_t k = 0; k < occ.size(); ++k) {
        if (occ[k] < 0 || occ[k] >= dims_[k])
            throw std::invalid_argument("occupation exceeds site dimension");
        idx += static_cast<std::size_t>(occ[k]) * strides_[k];
    }
    return idx;
}

int QuditRegister::level_at(std::size_t index, int site) const {
    return static_cast<int>((index / strides_.at(site)) % dims_[site]);
}

}  // namespace s7sim
