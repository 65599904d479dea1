#pragma once

// Internal FFTW helpers shared by the FIR filter and the signal generator.

#include <fftw3.h>

#include <cstddef>
#include <memory>
#include <mutex>

namespace mbci::detail {

inline std::mutex g_fftw_planner_mutex;

inline std::size_t fast_fft_size(std::size_t n)
{
    for (std::size_t m = n;; ++m) {
        std::size_t r = m;
        for (std::size_t p : {2u, 3u, 5u, 7u})
            while (r % p == 0)
                r /= p;
        if (r == 1)
            return m;
    }
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n)
{
    return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * n)));
}

class RealFft {
public:
    explicit RealFft(std::size_t n)
        : m_n(n), m_real(fftw_buffer<double>(n)), m_spec(fftw_buffer<fftw_complex>(n / 2 + 1))
    {
        std::lock_guard lock(g_fftw_planner_mutex);
        m_forward = fftw_plan_dft_r2c_1d(static_cast<int>(n), m_real.get(), m_spec.get(), FFTW_ESTIMATE);
        m_inverse = fftw_plan_dft_c2r_1d(static_cast<int>(n), m_spec.get(), m_real.get(), FFTW_ESTIMATE);
    }
    ~RealFft()
    {
        std::lock_guard lock(g_fftw_planner_mutex);
        fftw_destroy_plan(m_forward);
        fftw_destroy_plan(m_inverse);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    double* real() { return m_real.get(); }
    fftw_complex* spectrum() { return m_spec.get(); }
    void forward() { fftw_execute(m_forward); }
    void inverse() { fftw_execute(m_inverse); }
    std::size_t size() const { return m_n; }

private:
    std::size_t m_n;
    FftwBuffer<double> m_real;
    FftwBuffer<fftw_complex> m_spec;
    fftw_plan m_forward = nullptr;
    fftw_plan m_inverse = nullptr;
};

}  // namespace mbci::detail
