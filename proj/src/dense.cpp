#include "eer/dense.hpp"

namespace eer {

template struct BasicOperator<double>;
template struct BasicPureState<double>;
template struct BasicDensityMatrix<double>;

template BasicOperator<double> kron(const BasicOperator<double>&,
                                    const BasicOperator<double>&);
template ComplexMatrix<double> partial_trace_dense(const ComplexMatrix<double>&,
                                                   const BipartitePartition&,
                                                   Keep);
template BasicDensityMatrix<double> partial_trace(const BasicDensityMatrix<double>&,
                                                  const BipartitePartition&,
                                                  Keep);
template BasicOperator<double> commutator(const BasicOperator<double>&,
                                          const BasicOperator<double>&);
template HermitianEig<double> hermitian_eig(const BasicOperator<double>&);
template SpectralResult<double> matrix_func_hermitian(const BasicOperator<double>&,
                                                      MatrixFunc, double, double);
template std::complex<double> expectation(const BasicOperator<double>&,
                                          const BasicDensityMatrix<double>&);
template bool is_hollow(const BasicOperator<double>&, double);
template bool is_diagonal(const BasicOperator<double>&, double);

}  // namespace eer
