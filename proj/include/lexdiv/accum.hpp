#pragma once

namespace lexdiv {

// Kahan–Neumaier compensated summation; sums of ~10^7 terms used throughout
// stay accurate to the last few ulps.
template <typename T = double>
class KahanSum {
  public:
    void add(T x) {
        T t = s_ + x;
        if ((s_ >= 0 ? s_ : -s_) >= (x >= 0 ? x : -x))
            c_ += (s_ - t) + x;
        else
            c_ += (x - t) + s_;
        s_ = t;
    }
    KahanSum& operator+=(T x) {
        add(x);
        return *this;
    }
    T value() const { return s_ + c_; }

  private:
    T s_ = 0, c_ = 0;
};

}  // namespace lexdiv
