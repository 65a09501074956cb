#include "mbqc/sampler.hpp"

#include <cmath>

namespace mbqc {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed;
    const std::uint64_t a = splitmix64(s);
    s = stream ^ 0xD1B54A32D192ED03ull;
    const std::uint64_t b = splitmix64(s);
    state_ = a ^ (b + 0x9E3779B97F4A7C15ull);
}

std::uint64_t RngStream::next_u64() { return splitmix64(state_); }

bool RngStream::next_bit() {
    if (bits_left_ == 0) {
        bit_buffer_ = next_u64();
        bits_left_ = 64;
    }
    const bool bit = bit_buffer_ & 1u;
    bit_buffer_ >>= 1;
    --bits_left_;
    return bit;
}

double RngStream::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

StabilizerSampler::StabilizerSampler(const ResourceState& state)
    : state_(&state), measured_(state.measured()) {
    const FlowCheck check = verify_flow(state);
    if (!check.ok) {
        throw ValidationError("sampler requires a verified flow: " + check.detail);
    }
    t_stabs_ = derive_t_stabilizers(state);
    const std::size_t n = state.num_qubits();
    for (std::size_t i : state.flow.order) {
        r_stabs_.push_back(PauliWord::single(n, i, PauliLetter::Z) * state.flow.r_ops.at(i));
    }
}

SampleTrace StabilizerSampler::sample(RngStream& rng) const {
    const std::size_t n = state_->num_qubits();
    SampleTrace trace;
    trace.t_subset = BitVec(t_stabs_.size());
    trace.decisions = BitVec(r_stabs_.size());
    trace.result = PauliWord::identity(n);
    for (std::size_t k = 0; k < t_stabs_.size(); ++k) {
        if (rng.next_bit()) {
            trace.t_subset.set(k);
            trace.result.mul_inplace_right(t_stabs_[k]);
        }
    }
    for (std::size_t pos = 0; pos < state_->flow.order.size(); ++pos) {
        const std::size_t i = state_->flow.order[pos];
        // Anticommutes with Z_i iff the element acts X or Y on qubit i.
        if (!trace.result.x_mask().get(i)) {
            continue;
        }
        if (rng.next_bit()) {
            trace.decisions.set(pos);
            trace.result.mul_inplace_right(r_stabs_[pos]);
        }
    }
    trace.log2_prob = -static_cast<int>(state_->outputs.count() + trace.result.weight_on(measured_));
    return trace;
}

std::map<PauliWord, Dyadic> exact_distribution(const ResourceState& state, std::size_t cap) {
    if (state.num_qubits() > cap) {
        throw CapExceeded("exact distribution cap exceeded: n=" + std::to_string(state.num_qubits()) +
                          " > cap=" + std::to_string(cap));
    }
    StabilizerSampler sampler(state);
    std::vector<PauliWord> seeds;
    enumerate_products(state.num_qubits(), sampler.t_stabilizers(),
                       [&](const PauliWord& t, std::uint64_t) { seeds.push_back(t); });
    return lambda_expand_signed(state, seeds);
}

double empirical_check(const ResourceState& state, std::size_t samples, RngStream& rng,
                       std::size_t cap) {
    const auto exact = exact_distribution(state, cap);
    StabilizerSampler sampler(state);
    std::map<PauliWord, std::size_t> counts;
    for (std::size_t k = 0; k < samples; ++k) {
        ++counts[sampler.sample(rng).result];
    }
    double max_dev = 0.0;
    for (const auto& [word, prob] : exact) {
        const auto it = counts.find(word);
        const double empirical =
            it == counts.end() ? 0.0
                               : static_cast<double>(it->second) / static_cast<double>(samples);
        max_dev = std::max(max_dev, std::abs(empirical - prob.value()));
    }
    for (const auto& [word, count] : counts) {
        if (!exact.contains(word)) {
            max_dev = std::max(max_dev, static_cast<double>(count) / static_cast<double>(samples));
        }
    }
    return max_dev;
}

}  // namespace mbqc
