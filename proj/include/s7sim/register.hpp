#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace s7sim {

/// A register of mixed-dimension qudits (two or three levels per site).
/// Site order is fixed left-to-right, first site most significant in the
/// basis index.
class QuditRegister {
  public:
    QuditRegister(std::vector<int> dims, std::vector<std::string> labels);

    static QuditRegister qubits(int n, std::vector<std::string> labels = {});

    int num_sites() const { return static_cast<int>(dims_.size()); }
    int dim_of(int site) const { return dims_.at(site); }
    const std::vector<int>& dims() const { return dims_; }
    const std::vector<std::string>& labels() const { return labels_; }
    std::size_t total_dim() const { return total_dim_; }
    std::size_t stride(int site) const { return strides_.at(site); }

    int site_index(const std::string& label) const;

    /// Basis index of a product occupation (one level per site).
    std::size_t basis_index(const std::vector<int>& occ) const;
    /// Level of `site` within basis state `index`.
    int level_at(std::size_t index, int site) const;

    bool operator==(const QuditRegister& other) const { return dims_ == other.dims_; }

  private:
    std::vector<int> dims_;
    std::vector<std::string> labels_;
    std::vector<std::size_t> strides_;
    std::size_t total_dim_;
};

}  // namespace s7sim
