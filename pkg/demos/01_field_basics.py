"""
Field arithmetic and sparse matvec
==================================

GF(256) uses the AES polynomial, so addition is XOR and 0x57 * 0x83 = 0xC1.
"""
import numpy as np

from sparsepriv import get_field
from sparsepriv.matrix import DenseMatrix, SparseMatrix, matvec

F = get_field(256)
print("0x53 + 0xCA =", hex(int(F.add(0x53, 0xCA))))
print("0x57 * 0x83 =", hex(int(F.mul(0x57, 0x83))))
print("inverse of 0x53 =", hex(int(F.inv(0x53))))

# prime fields reduce mod q
P = get_field(7)
print("3 - 5 mod 7 =", int(P.sub(3, 5)), "  3^-1 mod 7 =", int(P.inv(3)))

# a small sparse matrix times a random vector, checked against the dense product
rng = np.random.default_rng(0)
dense = np.array([[0, 3, 0], [1, 0, 0], [0, 0, 0], [0, 6, 2]])
A = SparseMatrix.from_dense(dense, P)
x = DenseMatrix.random(P, 3, 1, rng)
print("nnz(A) =", A.nnz)
print("A x =", matvec(A, x).data.ravel(), " dense check:", (dense @ x.data).ravel() % 7)
