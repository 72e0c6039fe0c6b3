"""Prints the reference-toolkit values frozen into the unit tests."""
import os
import sys

from rdkit import Chem, RDConfig
from rdkit.Chem import Crippen, QED
from rdkit.Chem.Scaffolds import MurckoScaffold

sys.path.append(os.path.join(RDConfig.RDContribDir, "SA_Score"))
import sascorer  # noqa: E402

BIG = ("CC(C)Oc1ccc2c(c1)c1cc3c(cc1n2Cc1ccc(C(F)(F)F)cc1)C1(CCN(C(=O)c2ccc(Cl)"
       "cc2)CC1)c1ccc(OCc2ccc(N4CCOCC4)cc2)cc1-3")
FUSED_MACRO = "C1CC2CC3CC4CCCCCC4CC3CC2C1C1CCCCCCCCCCC1"

print("crippen CCO", Crippen.MolLogP(Chem.MolFromSmiles("CCO")))
for n in range(2, 9):
    print("crippen C%d" % n, Crippen.MolLogP(Chem.MolFromSmiles("C" * n)))
for smi in ["c1ccccc1", BIG]:
    m = Chem.MolFromSmiles(smi)
    print("qed", m.GetNumHeavyAtoms(), smi, QED.qed(m))
for smi in ["CCO", FUSED_MACRO]:
    print("sa", smi, sascorer.calculateScore(Chem.MolFromSmiles(smi)))
print("murcko", Chem.MolToSmiles(MurckoScaffold.GetScaffoldForMol(Chem.MolFromSmiles("CCc1ccccc1"))))
