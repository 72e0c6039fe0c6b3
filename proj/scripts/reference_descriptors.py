"""Writes per-molecule reference descriptors for the first corpus molecules.

Run once; the output is checked in and compared against by the unit tests.
"""
import csv
import sys

from rdkit import Chem
from rdkit.Chem import Crippen, QED, rdMolDescriptors

LIMIT = 300

def main(corpus, out):
    with open(corpus) as f:
        smiles = [line.strip() for line in f if line.strip()][:LIMIT]
    with open(out, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["smiles", "mw", "logp", "hba", "hbd", "tpsa", "rotb",
                    "arom", "rings", "spiro", "bridgehead"])
        for smi in smiles:
            m = Chem.MolFromSmiles(smi)
            p = QED.properties(m)
            w.writerow([smi, "%.6f" % p.MW, "%.6f" % p.ALOGP, p.HBA, p.HBD,
                        "%.4f" % p.PSA, p.ROTB, p.AROM,
                        rdMolDescriptors.CalcNumRings(m),
                        rdMolDescriptors.CalcNumSpiroAtoms(m),
                        rdMolDescriptors.CalcNumBridgeheadAtoms(m)])

if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
