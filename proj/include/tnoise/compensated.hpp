#pragma once
#ifdef __FAST_MATH__
#error fast math enabled, this would negate compensation.
#endif

#include <cmath>
#include <complex>

namespace tnoise {

// Neumaier (improved Kahan-Babuska) running sum.
template <typename T>
class NeumaierSum
{
public:
    NeumaierSum() = default;
    explicit NeumaierSum(T init) : sum_(init) {}

    NeumaierSum& operator+=(T x)
    {
        const T t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            carry_ += (sum_ - t) + x;
        else
            carry_ += (x - t) + sum_;
        sum_ = t;
        return *this;
    }
    NeumaierSum& operator-=(T x) { return *this += -x; }

    T value() const { return sum_ + carry_; }

private:
    T sum_{};
    T carry_{};
};

// Component-wise compensation for complex values.
template <typename T>
class NeumaierSum<std::complex<T>>
{
public:
    NeumaierSum() = default;

    NeumaierSum& operator+=(std::complex<T> x)
    {
        re_ += x.real();
        im_ += x.imag();
        return *this;
    }
    NeumaierSum& operator-=(std::complex<T> x) { return *this += -x; }

    std::complex<T> value() const { return {re_.value(), im_.value()}; }

private:
    NeumaierSum<T> re_;
    NeumaierSum<T> im_;
};

template <typename Range>
double compensated_sum(const Range& values)
{
    NeumaierSum<double> acc;
    for (double v : values)
        acc += v;
    return acc.value();
}

} // namespace tnoise
