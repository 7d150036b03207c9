# SID-DMD system identification package