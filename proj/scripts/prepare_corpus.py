"""Builds data/molecules.smi from the NCI sample set that ships with RDKit.

Run once; the output is checked in. Keeps the largest fragment, drops
stereo and isotopes, and restricts to drug-sized organic molecules.
"""
import os
import sys

from rdkit import Chem, RDConfig
from rdkit.Chem.MolStandardize import rdMolStandardize

ALLOWED = {"C", "N", "O", "S", "P", "F", "Cl", "Br", "I", "B"}


def main(out_path, limit=2000):
    src = os.path.join(RDConfig.RDDataDir, "NCI", "first_5K.smi")
    chooser = rdMolStandardize.LargestFragmentChooser()
    seen = set()
    out = []
    with open(src) as fh:
        for line in fh:
            smi = line.split()[0]
            mol = Chem.MolFromSmiles(smi)
            if mol is None:
                continue
            mol = chooser.choose(mol)
            if not 8 <= mol.GetNumHeavyAtoms() <= 45:
                continue
            if any(a.GetSymbol() not in ALLOWED for a in mol.GetAtoms()):
                continue
            if any(a.GetIsotope() for a in mol.GetAtoms()):
                continue
            if any(a.GetIsAromatic() and not a.IsInRing() for a in mol.GetAtoms()):
                continue
            if mol.GetRingInfo().NumRings() == 0 and len(out) % 3:
                # keep a minority of acyclic molecules
                continue
            can = Chem.MolToSmiles(mol, isomericSmiles=False)
            if can in seen:
                continue
            seen.add(can)
            out.append(can)
            if len(out) >= limit:
                break
    with open(out_path, "w") as fh:
        fh.write("\n".join(out) + "\n")
    print(f"wrote {len(out)} molecules to {out_path}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/molecules.smi")
