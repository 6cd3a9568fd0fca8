#pragma once

namespace mlab {

// Selects the serial reference kernels or their OpenMP counterparts.
// Both produce identical results: reductions go through per-row partial
// sums that are combined in a fixed order.
enum class Execution { Serial, Parallel };

void set_execution(Execution e);
Execution execution();

class ScopedExecution {
public:
    explicit ScopedExecution(Execution e) : prev_(execution()) { set_execution(e); }
    ~ScopedExecution() { set_execution(prev_); }
    ScopedExecution(const ScopedExecution&) = delete;
    ScopedExecution& operator=(const ScopedExecution&) = delete;

private:
    Execution prev_;
};

}  // namespace mlab
